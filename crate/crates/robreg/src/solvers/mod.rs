//! First-order solvers for the regularized objectives produced by the robust
//! equivalences:
//!
//! ```text
//! min_x ‖b - Ax‖_a + Σᵢ cᵢ|xᵢ|          (weighted-l1 penalty)
//! min_x ‖b - Ax‖_a + l · ‖x‖_{s*}        (dual-norm penalty)
//! ```
//!
//! Both terms are nonsmooth, so the solver works on the saddle reformulation
//! `min_x max_{‖y‖_{a*} ≤ 1} yᵀ(b - Ax) + reg(x)` with proximal steps on each
//! side (dual-ball projection for `y`, shrinkage for `x`). The exit
//! certificate is the primal-dual gap, with the dual candidate repaired into
//! feasibility before evaluation.

pub mod prox;

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::linalg::{orthonormal_basis, spectral_norm};
use crate::norms::{NormKind, NormTag};
use crate::{Error, ProblemInstance, Result, Scalar};

/// Options for the saddle-point scheme.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverOptions<S> {
    pub max_iters: usize,
    /// Relative tolerance on the primal-dual gap, checked every 100
    /// iterations: converged when `gap <= rel_tol * (1 + |objective|)`.
    pub rel_tol: S,
    /// Step-size safety factor; `sigma * tau * ‖A‖² = step_scale²` stays
    /// below one.
    pub step_scale: S,
    /// Power-iteration count for the spectral-norm estimate.
    pub power_iters: usize,
    /// Reserved for randomized restarts; the default scheme is deterministic.
    pub seed: u64,
}

impl<S: Scalar> Default for SolverOptions<S> {
    fn default() -> Self {
        SolverOptions {
            max_iters: 50_000,
            rel_tol: S::lit(1e-8),
            step_scale: S::lit(0.99),
            power_iters: 50,
            seed: 0,
        }
    }
}

impl<S: Scalar> SolverOptions<S> {
    pub(crate) fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidInput("max_iters must be at least 1".into()));
        }
        if self.rel_tol <= S::zero() || !self.rel_tol.is_finite() || self.rel_tol.is_nan() {
            return Err(Error::InvalidInput("rel_tol must be positive".into()));
        }
        if self.step_scale <= S::zero() || self.step_scale >= S::one() || self.step_scale.is_nan() {
            return Err(Error::InvalidInput("step_scale must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Solver output. `objective` is always recomputed from `x`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegressionSolution<S> {
    pub x: Vec<S>,
    pub objective: S,
    pub iterations: usize,
    pub converged: bool,
    /// Primal-dual gap at exit. Gap-certified solvers guarantee
    /// `gap <= rel_tol * (1 + |objective|)` whenever `converged` is set;
    /// methods without a per-run certificate (the subgradient scheme for
    /// general convex coupling) report infinity here.
    pub certificate_gap: S,
}

impl<S: Scalar> RegressionSolution<S> {
    pub fn weights(&self) -> Array1<S> {
        Array1::from(self.x.clone())
    }
}

/// The regularizers the saddle scheme knows how to prox.
#[derive(Debug, Clone)]
pub(crate) enum Regularizer<S> {
    /// `Σ cᵢ |xᵢ|`
    WeightedL1(Array1<S>),
    /// `l · ‖x‖₂`
    ScaledL2(S),
    /// `l · ‖x‖_∞`
    ScaledLInf(S),
}

impl<S: Scalar> Regularizer<S> {
    fn eval(&self, x: &Array1<S>) -> S {
        match self {
            Regularizer::WeightedL1(c) => c
                .iter()
                .zip(x.iter())
                .fold(S::zero(), |acc, (&ci, &xi)| acc + ci * xi.abs()),
            Regularizer::ScaledL2(l) => *l * NormTag::l2().eval(x),
            Regularizer::ScaledLInf(l) => *l * NormTag::linf().eval(x),
        }
    }

    fn prox(&self, v: &Array1<S>, tau: S) -> Array1<S> {
        match self {
            Regularizer::WeightedL1(c) => prox::soft_threshold(v, &c.mapv(|ci| tau * ci)),
            Regularizer::ScaledL2(l) => prox::block_shrink(v, tau * *l),
            Regularizer::ScaledLInf(l) => prox::prox_linf(v, tau * *l),
        }
    }

    /// Columns whose dual constraint is an equality `(Aᵀy)ⱼ = 0`; the dual
    /// repair projects these away instead of scaling.
    fn zero_columns(&self, m: usize) -> Vec<usize> {
        match self {
            Regularizer::WeightedL1(c) => (0..m).filter(|&j| c[j] == S::zero()).collect(),
            Regularizer::ScaledL2(l) | Regularizer::ScaledLInf(l) => {
                if *l == S::zero() {
                    (0..m).collect()
                } else {
                    Vec::new()
                }
            }
        }
    }

    /// Largest factor `s ≤ 1` such that `s·u` satisfies the conjugate's
    /// feasibility constraint (coordinates in `zero_cols` are exempt: the
    /// repair already removed them up to roundoff).
    fn dual_feasibility_scale(&self, u: &Array1<S>, zero_cols: &[usize]) -> S {
        let mut s = S::one();
        match self {
            Regularizer::WeightedL1(c) => {
                for j in 0..u.len() {
                    if zero_cols.contains(&j) {
                        continue;
                    }
                    let mag = u[j].abs();
                    if mag > c[j] {
                        s = s.min(c[j] / mag);
                    }
                }
            }
            Regularizer::ScaledL2(l) => {
                let norm = NormTag::l2().eval(u);
                if norm > *l && zero_cols.is_empty() {
                    s = s.min(*l / norm);
                }
            }
            Regularizer::ScaledLInf(l) => {
                let norm = NormTag::l1().eval(u);
                if norm > *l && zero_cols.is_empty() {
                    s = s.min(*l / norm);
                }
            }
        }
        s
    }
}

/// Projection onto the unit ball of the dual of the loss norm.
fn project_dual_ball<S: Scalar>(y: &Array1<S>, loss: NormKind) -> Array1<S> {
    match loss {
        NormKind::L2 => prox::project_l2_ball(y, S::one()),
        NormKind::L1 => prox::project_linf_ball(y, S::one()),
        NormKind::LInf => prox::project_l1_ball(y, S::one()),
    }
}

fn check_loss<S: Scalar>(loss: &NormTag<S>) -> Result<NormKind> {
    if loss.is_weighted() {
        return Err(Error::UnsupportedModel(
            "solver supports unweighted loss norms (l1, l2, linf)".into(),
        ));
    }
    Ok(loss.kind())
}

pub(crate) struct SaddleState<S> {
    pub x: Array1<S>,
    pub y: Array1<S>,
}

/// Core primal-dual loop; returns the solution and the final iterate pair for
/// warm starts.
pub(crate) fn solve_saddle<S: Scalar>(
    p: &ProblemInstance<S>,
    reg: &Regularizer<S>,
    loss: NormKind,
    opts: &SolverOptions<S>,
    warm: Option<SaddleState<S>>,
) -> (RegressionSolution<S>, SaddleState<S>) {
    let a = p.matrix();
    let b = p.targets();
    let (n, m) = (p.n(), p.m());
    let loss_tag = NormTag::from_kind(loss);

    let norm_a = spectral_norm(a, opts.power_iters) * S::lit(1.001) + S::lit(1e-12);
    let step = opts.step_scale / norm_a;
    let (sigma, tau) = (step, step);

    let zero_cols = reg.zero_columns(m);
    let zero_basis: Vec<Array1<S>> = if zero_cols.is_empty() {
        Vec::new()
    } else {
        let cols: Vec<Array1<S>> = zero_cols.iter().map(|&j| p.column(j).to_owned()).collect();
        orthonormal_basis(&cols, S::lit(1e-12))
    };

    let (mut x, mut y) = match warm {
        Some(state) => (state.x, state.y),
        None => (Array1::zeros(m), Array1::zeros(n)),
    };
    let mut x_bar = x.clone();

    let objective = |x: &Array1<S>| loss_tag.eval(&(b - &a.dot(x))) + reg.eval(x);

    let mut converged = false;
    let mut gap = S::infinity();
    let mut iters = 0;
    for it in 1..=opts.max_iters {
        iters = it;
        // dual ascent with the conjugate's linear tilt, then projection
        let drift = a.dot(&x_bar) - b;
        y.zip_mut_with(&drift, |yi, &di| *yi += sigma * di);
        y = project_dual_ball(&y, loss);
        // primal descent through the regularizer's prox
        let grad = a.t().dot(&y);
        let x_new = reg.prox(&(&x - &grad.mapv(|g| tau * g)), tau);
        x_bar = &x_new * S::lit(2.0) - &x;
        x = x_new;

        if it % 100 == 0 || it == opts.max_iters {
            let obj = objective(&x);
            gap = obj - dual_value(p, reg, loss, &y, &zero_basis, &zero_cols);
            if gap <= opts.rel_tol * (S::one() + obj.abs()) {
                converged = true;
                break;
            }
        }
    }
    let obj = objective(&x);
    let solution = RegressionSolution {
        x: x.to_vec(),
        objective: obj,
        iterations: iters,
        converged,
        certificate_gap: gap,
    };
    (solution, SaddleState { x, y })
}

/// Valid lower bound on the primal optimum from a dual iterate: repair `y`
/// into feasibility (null-space projection for zero-threshold columns, dual
/// ball renormalization, conjugate box scaling), then evaluate `-bᵀy`. Zero
/// is always a fallback since the objective is nonnegative.
fn dual_value<S: Scalar>(
    p: &ProblemInstance<S>,
    reg: &Regularizer<S>,
    loss: NormKind,
    y: &Array1<S>,
    zero_basis: &[Array1<S>],
    zero_cols: &[usize],
) -> S {
    let mut yy = y.clone();
    for q in zero_basis {
        let coeff = yy.dot(q);
        yy.zip_mut_with(q, |yi, &qi| *yi -= coeff * qi);
    }
    // scale into the dual unit ball (scaling preserves feasibility for every
    // ball and keeps the direction)
    let dual_norm = match loss {
        NormKind::L2 => NormTag::l2().eval(&yy),
        NormKind::L1 => NormTag::linf().eval(&yy),
        NormKind::LInf => NormTag::l1().eval(&yy),
    };
    if dual_norm > S::one() {
        yy.mapv_inplace(|v| v / dual_norm);
    }
    let u = p.matrix().t().dot(&yy);
    let s = reg.dual_feasibility_scale(&u, zero_cols);
    let bound = -p.targets().dot(&yy) * s;
    bound.max(S::zero())
}

/// Minimize `‖b - Ax‖_loss + Σᵢ cᵢ|xᵢ|` (the exact reformulation of the
/// uncoupled robust regression problem).
pub fn solve_weighted_l1<S: Scalar>(
    p: &ProblemInstance<S>,
    c: &Array1<S>,
    loss: &NormTag<S>,
    opts: &SolverOptions<S>,
) -> Result<RegressionSolution<S>> {
    let kind = check_loss(loss)?;
    opts.validate()?;
    if c.len() != p.m() {
        return Err(Error::DimensionMismatch(format!(
            "{} penalties for {} features",
            c.len(),
            p.m()
        )));
    }
    if c.iter().any(|ci| *ci < S::zero() || !ci.is_finite()) {
        return Err(Error::InvalidInput(
            "penalty weights must be nonnegative".into(),
        ));
    }
    let reg = Regularizer::WeightedL1(c.clone());
    Ok(solve_saddle(p, &reg, kind, opts, None).0)
}

/// Minimize `‖b - Ax‖_loss + l·‖x‖_{dual(aggregator)}` (the reformulation of
/// the norm-coupled uncertainty set with the given aggregator).
pub fn solve_dual_norm_reg<S: Scalar>(
    p: &ProblemInstance<S>,
    loss: &NormTag<S>,
    aggregator: &NormTag<S>,
    l: S,
    opts: &SolverOptions<S>,
) -> Result<RegressionSolution<S>> {
    let kind = check_loss(loss)?;
    opts.validate()?;
    if l < S::zero() || !l.is_finite() {
        return Err(Error::InvalidInput(
            "coupling radius must be nonnegative".into(),
        ));
    }
    let dual = aggregator.dual()?;
    let reg = match (dual.kind(), dual.weights()) {
        (NormKind::L1, None) => Regularizer::WeightedL1(Array1::from_elem(p.m(), l)),
        (NormKind::L1, Some(w)) => {
            if w.len() != p.m() {
                return Err(Error::DimensionMismatch(
                    "aggregator weights vs features".into(),
                ));
            }
            Regularizer::WeightedL1(w.mapv(|wi| l * wi))
        }
        (NormKind::L2, None) => Regularizer::ScaledL2(l),
        (NormKind::LInf, None) => Regularizer::ScaledLInf(l),
        _ => {
            return Err(Error::UnsupportedModel(
                "weighted aggregators are supported only when their dual is a weighted l1 norm"
                    .into(),
            ))
        }
    };
    Ok(solve_saddle(p, &reg, kind, opts, None).0)
}

/// Solve a grid of weighted-l1 problems in order, warm-starting each point
/// from the previous iterate pair.
pub fn regularization_path<S: Scalar>(
    p: &ProblemInstance<S>,
    c_grid: &[Array1<S>],
    loss: &NormTag<S>,
    opts: &SolverOptions<S>,
) -> Result<Vec<RegressionSolution<S>>> {
    let kind = check_loss(loss)?;
    opts.validate()?;
    if c_grid.is_empty() {
        return Err(Error::InvalidInput("empty regularization grid".into()));
    }
    let mut out = Vec::with_capacity(c_grid.len());
    let mut warm: Option<SaddleState<S>> = None;
    for c in c_grid {
        if c.len() != p.m() {
            return Err(Error::DimensionMismatch(
                "grid point has wrong length".into(),
            ));
        }
        if c.iter().any(|ci| *ci < S::zero()) {
            return Err(Error::InvalidInput(
                "penalty weights must be nonnegative".into(),
            ));
        }
        let reg = Regularizer::WeightedL1(c.clone());
        let (sol, state) = solve_saddle(p, &reg, kind, opts, warm.take());
        out.push(sol);
        warm = Some(state);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::robust::worst_case_residual;
    use crate::UncertaintyModel;
    use approx::assert_relative_eq;
    use ndarray::{array, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// 1-D brute-force oracle: minimize ‖b - a·x‖_loss + c|x| on a grid.
    fn grid_oracle_1d(
        a: &Array1<f64>,
        b: &Array1<f64>,
        c: f64,
        loss: &NormTag<f64>,
        lo: f64,
        hi: f64,
        step: f64,
    ) -> f64 {
        let mut best = f64::INFINITY;
        let mut x = lo;
        while x <= hi {
            let r = b - &a.mapv(|ai| ai * x);
            let obj = loss.eval(&r) + c * x.abs();
            if obj < best {
                best = obj;
            }
            x += step;
        }
        best
    }

    fn fixture() -> ProblemInstance<f64> {
        ProblemInstance::new(array![[1.0], [0.0]], array![1.0, 1.0]).unwrap()
    }

    #[test]
    fn huge_penalty_zeroes_the_solution() {
        let p = ProblemInstance::new(array![[1.0, 0.3], [0.4, 1.0]], array![2.0, -1.0]).unwrap();
        let c = array![100.0_f64, 100.0];
        for loss in [NormTag::l1(), NormTag::l2(), NormTag::linf()] {
            let sol = solve_weighted_l1(&p, &c, &loss, &SolverOptions::default()).unwrap();
            assert!(sol.converged);
            for xi in &sol.x {
                assert!(xi.abs() < 1e-9, "expected zero weights, got {:?}", sol.x);
            }
            assert_relative_eq!(sol.objective, loss.eval(p.targets()), max_relative = 1e-8);
        }
    }

    #[test]
    fn unregularized_square_system_interpolates() {
        let p = ProblemInstance::new(array![[2.0, 1.0], [1.0, 3.0]], array![5.0, 10.0]).unwrap();
        let c = array![0.0, 0.0];
        let sol = solve_weighted_l1(&p, &c, &NormTag::l2(), &SolverOptions::default()).unwrap();
        assert!(sol.converged);
        assert!(sol.objective < 1e-7, "objective {}", sol.objective);
        let expect = crate::linalg::solve_linear(p.matrix(), p.targets()).unwrap();
        for (got, want) in sol.x.iter().zip(expect.iter()) {
            assert_relative_eq!(got, want, epsilon = 1e-6);
        }
    }

    #[test]
    fn scalar_instance_matches_grid_oracle() {
        let p = fixture();
        for c1 in [0.05, 0.3, 0.9] {
            let sol = solve_weighted_l1(&p, &array![c1], &NormTag::l2(), &SolverOptions::default())
                .unwrap();
            assert!(sol.converged);
            let oracle = grid_oracle_1d(
                &p.matrix().column(0).to_owned(),
                p.targets(),
                c1,
                &NormTag::l2(),
                -3.0,
                3.0,
                1e-5,
            );
            assert!(
                (sol.objective - oracle).abs() <= 1e-4,
                "c={c1}: solver {} vs oracle {oracle}",
                sol.objective
            );
        }
    }

    #[test]
    fn gap_certificate_holds_at_exit() {
        let p = ProblemInstance::new(
            array![
                [1.0, 0.2, -0.4],
                [0.3, 0.9, 0.1],
                [-0.2, 0.5, 1.1],
                [0.6, -0.7, 0.2]
            ],
            array![1.0, -2.0, 0.5, 0.3],
        )
        .unwrap();
        let c = array![0.2, 0.4, 0.1];
        let opts = SolverOptions::<f64>::default();
        for loss in [NormTag::l1(), NormTag::l2(), NormTag::linf()] {
            let sol = solve_weighted_l1(&p, &c, &loss, &opts).unwrap();
            assert!(sol.converged, "loss {:?}", loss.kind());
            assert!(sol.certificate_gap <= opts.rel_tol * (1.0 + sol.objective.abs()));
        }
    }

    #[test]
    fn objective_equals_worst_case_residual() {
        let p = ProblemInstance::new(
            array![[1.0, 0.2], [0.3, 0.9], [-0.2, 0.5]],
            array![1.0, -2.0, 0.5],
        )
        .unwrap();
        let c = array![0.3, 0.15];
        for loss in [NormTag::l1(), NormTag::l2(), NormTag::linf()] {
            let sol = solve_weighted_l1(&p, &c, &loss, &SolverOptions::default()).unwrap();
            let u = UncertaintyModel::uncoupled(c.clone()).unwrap();
            let wc = worst_case_residual(&p, &sol.weights(), &u, &loss).unwrap();
            assert_relative_eq!(sol.objective, wc, epsilon = 1e-12);
        }
    }

    #[test]
    fn linf_aggregator_matches_uniform_weighted_l1() {
        let p = ProblemInstance::new(
            array![[1.0, 0.2], [0.3, 0.9], [-0.2, 0.5]],
            array![1.0, -2.0, 0.5],
        )
        .unwrap();
        let l = 0.25;
        let via_dual = solve_dual_norm_reg(
            &p,
            &NormTag::l2(),
            &NormTag::linf(),
            l,
            &SolverOptions::default(),
        )
        .unwrap();
        let via_l1 = solve_weighted_l1(
            &p,
            &Array1::from_elem(2, l),
            &NormTag::l2(),
            &SolverOptions::default(),
        )
        .unwrap();
        assert_relative_eq!(via_dual.objective, via_l1.objective, max_relative = 1e-7);
    }

    #[test]
    fn l2_aggregator_matches_scalar_grid_oracle() {
        // scalar instance so the grid oracle applies to the l2-regularized form
        let p = fixture();
        let l = 0.4;
        let sol = solve_dual_norm_reg(
            &p,
            &NormTag::l2(),
            &NormTag::l2(),
            l,
            &SolverOptions::default(),
        )
        .unwrap();
        assert!(sol.converged);
        // for m = 1, l‖x‖₂ = l|x|: reuse the weighted-l1 oracle
        let oracle = grid_oracle_1d(
            &p.matrix().column(0).to_owned(),
            p.targets(),
            l,
            &NormTag::l2(),
            -3.0,
            3.0,
            1e-5,
        );
        assert!((sol.objective - oracle).abs() <= 1e-4);
    }

    #[test]
    fn zero_radius_dual_norm_equals_unregularized() {
        let p = ProblemInstance::new(array![[2.0, 1.0], [1.0, 3.0]], array![5.0, 10.0]).unwrap();
        let a = solve_dual_norm_reg(
            &p,
            &NormTag::l2(),
            &NormTag::l2(),
            0.0,
            &SolverOptions::default(),
        )
        .unwrap();
        let b = solve_weighted_l1(
            &p,
            &array![0.0, 0.0],
            &NormTag::l2(),
            &SolverOptions::default(),
        )
        .unwrap();
        assert_relative_eq!(a.objective, b.objective, epsilon = 1e-7);
    }

    #[test]
    fn path_single_point_and_monotone_grid() {
        let p = ProblemInstance::new(array![[2.0, 1.0], [1.0, 3.0]], array![5.0, 10.0]).unwrap();
        let single = regularization_path(
            &p,
            &[Array1::zeros(2)],
            &NormTag::l2(),
            &SolverOptions::default(),
        )
        .unwrap();
        assert_eq!(single.len(), 1);
        assert!(single[0].objective < 1e-7);

        let grid: Vec<Array1<f64>> = [0.0, 0.1, 0.5, 1.0, 5.0]
            .iter()
            .map(|&c| Array1::from_elem(2, c))
            .collect();
        let sols =
            regularization_path(&p, &grid, &NormTag::l2(), &SolverOptions::default()).unwrap();
        for w in sols.windows(2) {
            assert!(w[0].objective <= w[1].objective + 1e-9);
        }
    }

    #[test]
    fn path_matches_per_point_oracles() {
        let p = fixture();
        let grid: Vec<f64> = vec![0.01, 0.0316, 0.1, 0.316, 1.0];
        let arrays: Vec<Array1<f64>> = grid.iter().map(|&c| array![c]).collect();
        let sols =
            regularization_path(&p, &arrays, &NormTag::l2(), &SolverOptions::default()).unwrap();
        for (c, sol) in grid.iter().zip(&sols) {
            let oracle = grid_oracle_1d(
                &p.matrix().column(0).to_owned(),
                p.targets(),
                *c,
                &NormTag::l2(),
                -3.0,
                3.0,
                1e-5,
            );
            assert!(sol.converged);
            assert!((sol.objective - oracle).abs() <= 1e-4, "c={c}");
        }
    }

    #[test]
    fn column_permutation_permutes_the_solution() {
        let a = array![[1.0, 0.2, -0.4], [0.3, 0.9, 0.1], [-0.2, 0.5, 1.1]];
        let b = array![1.0, -2.0, 0.5];
        let c = array![0.1, 0.2, 0.3];
        let p = ProblemInstance::new(a.clone(), b.clone()).unwrap();
        let sol = solve_weighted_l1(&p, &c, &NormTag::l2(), &SolverOptions::default()).unwrap();

        // permute columns 0 <-> 2
        let mut ap = a.clone();
        for r in 0..3 {
            ap[[r, 0]] = a[[r, 2]];
            ap[[r, 2]] = a[[r, 0]];
        }
        let pp = ProblemInstance::new(ap, b).unwrap();
        let cp = array![0.3, 0.2, 0.1];
        let solp = solve_weighted_l1(&pp, &cp, &NormTag::l2(), &SolverOptions::default()).unwrap();
        assert_relative_eq!(sol.x[0], solp.x[2], epsilon = 1e-10);
        assert_relative_eq!(sol.x[1], solp.x[1], epsilon = 1e-10);
        assert_relative_eq!(sol.x[2], solp.x[0], epsilon = 1e-10);
    }

    #[test]
    fn dominated_columns_get_zero_weight() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let n = 4;
            let m = 3;
            let a = Array2::from_shape_fn((n, m), |_| rng.gen_range(-1.0..1.0));
            let b = Array1::from_shape_fn(n, |_| rng.gen_range(-1.0..1.0));
            let p = ProblemInstance::new(a.clone(), b).unwrap();
            // c_j >= ‖a_j‖₂ forces x_j = 0 under the l2 loss
            let j = 1;
            let col_norm = NormTag::l2().eval(&a.column(j).to_owned());
            let mut c = Array1::from_elem(m, 0.05);
            c[j] = col_norm * 1.1;
            let sol = solve_weighted_l1(&p, &c, &NormTag::l2(), &SolverOptions::default()).unwrap();
            let xj: f64 = sol.x[j];
            assert!(xj.abs() <= 1e-7, "x_j = {xj} should vanish");
        }
    }
}
