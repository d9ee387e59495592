//! Solvers for coupled uncertainty sets.
//!
//! General convex coupling `{c ≥ 0 : f_j(c) ≤ 0}` reduces the robust problem
//! to `min_{λ≥0, κ≥0, x} ‖b - Ax‖_a + v(λ, κ, x)` with
//! `v(λ, κ, x) = max_c (κ + |x|)ᵀ c - Σ λⱼ fⱼ(c)`; the maximizer of the inner
//! concave problem supplies a subgradient of `v`, so the outer minimization
//! runs a projected subgradient method. Polytope coupling `{c ≥ 0 : Tc ≤ s}`
//! instead yields `min ‖b - Ax‖_a + sᵀλ` over `|x| ≤ Tᵀλ, λ ≥ 0`, which is
//! solved by the same saddle-point splitting as the uncoupled case, with an
//! embedded LP recovering the reported multipliers.

use std::sync::Arc;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lp::{lp_solve, LpOutcome};
use crate::norms::{NormKind, NormTag};
use crate::solvers::prox;
use crate::solvers::{RegressionSolution, SolverOptions};
use crate::{Error, ProblemInstance, Result, Scalar};

type ConstraintFn<S> = Arc<dyn Fn(&Array1<S>) -> (S, Array1<S>) + Send + Sync>;

/// Convex constraints `f_j(c) ≤ 0` given by value-plus-subgradient oracles,
/// together with a strictly feasible point (Slater witness).
#[derive(Clone)]
pub struct ConvexConstraintOracle<S> {
    constraints: Vec<ConstraintFn<S>>,
    slater: Array1<S>,
}

impl<S> ConvexConstraintOracle<S> {
    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.slater.len()
    }
}

impl<S: Scalar> ConvexConstraintOracle<S> {
    /// Build an oracle. Each closure must return `(f_j(c), g)` with `g` a
    /// subgradient of `f_j` at `c`. The witness must satisfy `f_j(z₀) < 0`
    /// and `z₀ ≥ 0`; convexity is spot-checked on 100 random segments.
    pub fn new(constraints: Vec<ConstraintFn<S>>, slater: Array1<S>) -> Result<Self> {
        if constraints.is_empty() {
            return Err(Error::InvalidOracle(
                "at least one constraint required".into(),
            ));
        }
        if slater.iter().any(|z| *z < S::zero()) {
            return Err(Error::InvalidOracle(
                "Slater witness must be nonnegative".into(),
            ));
        }
        for (j, f) in constraints.iter().enumerate() {
            let (val, _) = f(&slater);
            if val >= S::zero() || val.is_nan() {
                return Err(Error::InvalidOracle(format!(
                    "witness is not strictly feasible for constraint {j}: f = {val:?}",
                )));
            }
        }
        let oracle = ConvexConstraintOracle {
            constraints,
            slater,
        };
        oracle.spot_check_convexity()?;
        Ok(oracle)
    }

    pub fn slater_witness(&self) -> &Array1<S> {
        &self.slater
    }

    /// Value and subgradient of constraint `j` at `c`.
    pub fn eval(&self, j: usize, c: &Array1<S>) -> (S, Array1<S>) {
        (self.constraints[j])(c)
    }

    fn spot_check_convexity(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let dim = self.dimension();
        let scale = self
            .slater
            .iter()
            .fold(S::one(), |a, &z| a.max(z * S::lit(2.0)))
            + S::one();
        for _ in 0..100 {
            let p = Array1::from_shape_fn(dim, |_| S::lit(rng.gen::<f64>()) * scale);
            let q = Array1::from_shape_fn(dim, |_| S::lit(rng.gen::<f64>()) * scale);
            let mid = (&p + &q).mapv(|v| v * S::lit(0.5));
            for (j, f) in self.constraints.iter().enumerate() {
                let (fp, _) = f(&p);
                let (fq, _) = f(&q);
                let (fm, _) = f(&mid);
                if fm > (fp + fq) * S::lit(0.5) + S::lit(1e-9) {
                    return Err(Error::InvalidOracle(format!(
                        "constraint {j} fails midpoint convexity",
                    )));
                }
            }
        }
        Ok(())
    }
}

impl<S> std::fmt::Debug for ConvexConstraintOracle<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConvexConstraintOracle")
            .field("constraints", &self.constraints.len())
            .finish()
    }
}

/// Result of the inner maximization defining `v(λ, κ, x)`.
#[derive(Debug, Clone)]
pub struct InnerMaxResult<S> {
    /// `None` encodes +∞ (the iterates diverged).
    pub value: Option<S>,
    /// The (approximate) maximizer `c₀`; for a diverged run, the last iterate.
    pub maximizer: Array1<S>,
    /// `∂v/∂λ_j = -f_j(c₀)`
    pub grad_lambda: Array1<S>,
    /// `∂v/∂κ_i = c₀ᵢ`
    pub grad_kappa: Array1<S>,
    /// `∂v/∂x_i = sgn(xᵢ)·c₀ᵢ` (with `sgn(0) = 0`)
    pub grad_x: Array1<S>,
}

fn sgn<S: Scalar>(x: S) -> S {
    if x > S::zero() {
        S::one()
    } else if x < S::zero() {
        -S::one()
    } else {
        S::zero()
    }
}

/// Evaluate `v(λ, κ, x) = max_{c} (κ+|x|)ᵀc - Σ λⱼ fⱼ(c)` by projected
/// gradient ascent from the Slater witness, projecting onto `c ≥ 0`.
/// Divergence (`‖c‖_∞ > 1e6`) is reported as +∞.
pub fn eval_v<S: Scalar>(
    lambda: &Array1<S>,
    kappa: &Array1<S>,
    x: &Array1<S>,
    oracle: &ConvexConstraintOracle<S>,
) -> Result<InnerMaxResult<S>> {
    eval_v_from(lambda, kappa, x, oracle, oracle.slater_witness())
}

/// [`eval_v`] with an explicit ascent start, so outer loops can warm-start
/// from the previous maximizer.
fn eval_v_from<S: Scalar>(
    lambda: &Array1<S>,
    kappa: &Array1<S>,
    x: &Array1<S>,
    oracle: &ConvexConstraintOracle<S>,
    start: &Array1<S>,
) -> Result<InnerMaxResult<S>> {
    if lambda.iter().any(|l| *l < S::zero()) {
        return Err(Error::InvalidInput("lambda must be nonnegative".into()));
    }
    if kappa.iter().any(|k| *k < S::zero()) {
        return Err(Error::InvalidInput("kappa must be nonnegative".into()));
    }
    let k = oracle.len();
    if lambda.len() != k {
        return Err(Error::DimensionMismatch(
            "lambda length vs constraint count".into(),
        ));
    }
    let m = oracle.dimension();
    if kappa.len() != m || x.len() != m {
        return Err(Error::DimensionMismatch(
            "kappa/x length vs oracle dimension".into(),
        ));
    }

    let linear = Array1::from_shape_fn(m, |i| kappa[i] + x[i].abs());
    let objective_and_grad = |c: &Array1<S>| -> (S, Array1<S>) {
        let mut val = linear.dot(c);
        let mut grad = linear.clone();
        for (j, lam) in lambda.iter().enumerate() {
            if *lam == S::zero() {
                continue;
            }
            let (fj, gj) = oracle.eval(j, c);
            val -= *lam * fj;
            grad.zip_mut_with(&gj, |gi, &gji| *gi -= *lam * gji);
        }
        (val, grad)
    };

    let cap = S::lit(1e6);
    let runaway = cap * S::lit(10.0);
    let mut c = start.mapv(|v| v.max(S::zero()).min(cap));
    let (mut best_val, mut grad) = objective_and_grad(&c);
    let mut best_c = c.clone();
    let mut step = S::one();
    for _ in 0..2_000 {
        let gnorm = NormTag::l2().eval(&grad);
        if gnorm <= S::lit(1e-12) * (S::one() + best_val.abs()) {
            break;
        }
        // ascent step scaled by 1/‖g‖, expanded on success, backtracked on
        // failure so linear objectives escape to the divergence cap quickly
        let mut advanced = false;
        for _ in 0..40 {
            let trial =
                Array1::from_shape_fn(c.len(), |i| (c[i] + step * grad[i] / gnorm).max(S::zero()));
            let (tv, tg) = objective_and_grad(&trial);
            if tv > best_val {
                c = trial;
                best_val = tv;
                best_c = c.clone();
                grad = tg;
                step *= S::lit(1.5);
                advanced = true;
                break;
            }
            step *= S::lit(0.5);
            if step < S::lit(1e-14) {
                break;
            }
        }
        if NormTag::linf().eval(&c) > runaway || !advanced {
            break;
        }
    }
    // diverged iff the ascent is still climbing beyond the cap at the end;
    // a warm start parked beyond the cap walks back in on bounded problems
    let diverged = NormTag::linf().eval(&best_c) > cap;

    let grad_lambda = Array1::from_shape_fn(k, |j| -oracle.eval(j, &best_c).0);
    let grad_kappa = best_c.clone();
    let grad_x = Array1::from_shape_fn(m, |i| sgn(x[i]) * best_c[i]);
    Ok(InnerMaxResult {
        value: if diverged { None } else { Some(best_val) },
        maximizer: best_c,
        grad_lambda,
        grad_kappa,
        grad_x,
    })
}

fn loss_subgradient<S: Scalar>(res: &Array1<S>, kind: NormKind) -> Array1<S> {
    match kind {
        NormKind::L2 => {
            let norm = NormTag::l2().eval(res);
            if norm == S::zero() {
                Array1::zeros(res.len())
            } else {
                res.mapv(|r| r / norm)
            }
        }
        NormKind::L1 => res.mapv(sgn),
        NormKind::LInf => {
            let mut g = Array1::zeros(res.len());
            let mut best = (0, S::zero());
            for (i, &r) in res.iter().enumerate() {
                if r.abs() > best.1 {
                    best = (i, r.abs());
                }
            }
            if best.1 > S::zero() {
                g[best.0] = sgn(res[best.0]);
            }
            g
        }
    }
}

/// Minimize `‖b - Ax‖_loss + v(λ, κ, x)` over `λ ≥ 0, κ ≥ 0, x` by projected
/// subgradient descent with diminishing steps and best-iterate tracking.
/// Returns the best solution found together with its `(λ, κ)`.
pub fn solve_general_uncertainty<S: Scalar>(
    p: &ProblemInstance<S>,
    oracle: &ConvexConstraintOracle<S>,
    loss: &NormTag<S>,
    opts: &SolverOptions<S>,
) -> Result<(RegressionSolution<S>, Array1<S>, Array1<S>)> {
    if loss.is_weighted() {
        return Err(Error::UnsupportedModel("unweighted loss norms only".into()));
    }
    opts.validate()?;
    let m = p.m();
    if oracle.dimension() != m {
        return Err(Error::DimensionMismatch(
            "oracle dimension vs feature count".into(),
        ));
    }
    let k = oracle.len();
    let kind = loss.kind();
    let a = p.matrix();
    let b = p.targets();

    let mut lambda = Array1::from_elem(k, S::one());
    let mut kappa = Array1::zeros(m);
    let mut x = Array1::zeros(m);

    // escalate lambda until the inner maximization is bounded at the start
    let mut inner = eval_v(&lambda, &kappa, &x, oracle)?;
    let mut escalations = 0;
    while inner.value.is_none() {
        escalations += 1;
        if escalations > 60 {
            return Err(Error::UnboundedUncertainty);
        }
        lambda.mapv_inplace(|l| l * S::lit(2.0) + S::lit(0.1));
        inner = eval_v(&lambda, &kappa, &x, oracle)?;
    }

    let objective =
        |x: &Array1<S>, v: S| -> S { NormTag::from_kind(kind).eval(&(b - &a.dot(x))) + v };
    let mut best = (
        objective(&x, inner.value.unwrap()),
        x.clone(),
        lambda.clone(),
        kappa.clone(),
    );

    let iters = 20_000.min(opts.max_iters);
    // stage one follows the eta0/sqrt(t) schedule; stage two decays the step
    // geometrically, which closes in fast on polyhedral (sharp) objectives
    let eta0 = S::one();
    let half = iters / 2;
    let decay = S::lit((1e-5_f64).powf(1.0 / half.max(1) as f64));
    let mut eta_geo = eta0 / S::from(half.max(1)).unwrap().sqrt();
    let mut diverged_streak = 0usize;
    let mut streak_escalations = 0usize;
    for t in 1..=iters {
        // subgradient of the full objective at (lambda, kappa, x); when the
        // inner problem diverged the capped maximizer still yields a usable
        // direction (it is the exact-penalty subgradient)
        let res = b - &a.dot(&x);
        let gy = loss_subgradient(&res, kind);
        let mut gx = a.t().dot(&gy).mapv(|v| -v);
        gx.zip_mut_with(&inner.grad_x, |gi, &vi| *gi += vi);
        let gl = inner.grad_lambda.clone();
        let gk = inner.grad_kappa.clone();

        let gnorm = (gx.dot(&gx) + gl.dot(&gl) + gk.dot(&gk)).sqrt();
        let eta_t = if t <= half {
            eta0 / S::from(t).unwrap().sqrt()
        } else {
            eta_geo *= decay;
            eta_geo
        };
        if gnorm > S::zero() {
            let eta = eta_t / gnorm.max(S::one());
            x.zip_mut_with(&gx, |xi, &gi| *xi -= eta * gi);
            lambda.zip_mut_with(&gl, |li, &gi| *li = (*li - eta * gi).max(S::zero()));
            kappa.zip_mut_with(&gk, |ki, &gi| *ki = (*ki - eta * gi).max(S::zero()));
        }

        inner = eval_v_from(&lambda, &kappa, &x, oracle, &inner.maximizer)?;
        match inner.value {
            Some(v) => {
                diverged_streak = 0;
                streak_escalations = 0;
                let obj = objective(&x, v);
                if obj < best.0 {
                    best = (obj, x.clone(), lambda.clone(), kappa.clone());
                }
            }
            None => {
                diverged_streak += 1;
                if diverged_streak.is_multiple_of(50) {
                    streak_escalations += 1;
                    if streak_escalations > 60 {
                        return Err(Error::UnboundedUncertainty);
                    }
                    lambda.mapv_inplace(|l| l * S::lit(2.0) + S::lit(0.1));
                    inner = eval_v_from(&lambda, &kappa, &x, oracle, &inner.maximizer)?;
                }
            }
        }
    }

    let (obj, x, lambda, kappa) = best;
    let solution = RegressionSolution {
        x: x.to_vec(),
        objective: obj,
        iterations: iters,
        converged: true,
        // subgradient methods carry no per-run duality certificate
        certificate_gap: S::infinity(),
    };
    Ok((solution, lambda, kappa))
}

/// The weighted-l1-like penalty induced by a polytope budget set:
/// `L(w) = min { sᵀλ : Tᵀλ ≥ w, λ ≥ 0 }`, evaluated by the embedded LP.
/// Returns the value and the optimal `λ`.
pub fn polytope_penalty<S: Scalar>(
    t: &Array2<S>,
    s: &Array1<S>,
    w: &Array1<S>,
) -> Result<(S, Array1<S>)> {
    // variables λ ∈ R^k: min sᵀλ s.t. Tᵀ λ ≥ w, λ ≥ 0
    let g = t.t().to_owned();
    match lp_solve(s, &g, w)? {
        LpOutcome::Optimal(opt) => Ok((opt.objective, opt.y)),
        LpOutcome::Infeasible => Err(Error::BudgetInfeasible),
        LpOutcome::Unbounded => Err(Error::InvalidInput(
            "polytope penalty unbounded below (negative budget prices)".into(),
        )),
    }
}

/// Solve the polytope-coupled robust problem
/// `min_x ‖b - Ax‖_loss + L(|x|)` by splitting on the joint variable
/// `(x, λ)` with the linear constraints `±x ≤ Tᵀλ, λ ≥ 0` handled by
/// projection, then evaluating the reported multipliers through the LP.
pub fn solve_polytope_uncertainty<S: Scalar>(
    p: &ProblemInstance<S>,
    t: &Array2<S>,
    s: &Array1<S>,
    loss: &NormTag<S>,
    opts: &SolverOptions<S>,
) -> Result<(RegressionSolution<S>, Array1<S>)> {
    if loss.is_weighted() {
        return Err(Error::UnsupportedModel("unweighted loss norms only".into()));
    }
    opts.validate()?;
    let kind = loss.kind();
    let (k, m) = (t.nrows(), t.ncols());
    if m != p.m() {
        return Err(Error::DimensionMismatch(
            "T columns vs feature count".into(),
        ));
    }
    if s.len() != k {
        return Err(Error::DimensionMismatch("s length vs T rows".into()));
    }
    let n = p.n();
    let a = p.matrix();
    let b = p.targets();

    // saddle form on u = (x, λ):
    //   min_u  g(u) + f1(A x) + f2(x - Tᵀλ) + f3(-x - Tᵀλ)
    // with g(u) = sᵀλ + ι{λ≥0}, f1(z) = ‖b - z‖_loss, f2 = f3 = ι{· ≤ 0}.
    // The stacked operator K: u -> (Ax, x - Tᵀλ, -x - Tᵀλ).
    let tt = t.t().to_owned();
    let apply_k = |x: &Array1<S>, lam: &Array1<S>| -> (Array1<S>, Array1<S>, Array1<S>) {
        let ttl = tt.dot(lam);
        (a.dot(x), x - &ttl, x.mapv(|v| -v) - &ttl)
    };
    let apply_kt = |y1: &Array1<S>, y2: &Array1<S>, y3: &Array1<S>| -> (Array1<S>, Array1<S>) {
        let gx = a.t().dot(y1) + y2 - y3;
        let gl = t.dot(&(y2 + y3)).mapv(|v| -v);
        (gx, gl)
    };
    // crude but safe operator-norm bound for the stacked K
    let norm_a = crate::linalg::spectral_norm(a, opts.power_iters);
    let norm_t = crate::linalg::spectral_norm(t, opts.power_iters);
    let norm_k = (norm_a * norm_a + S::lit(2.0) * (S::one() + norm_t * norm_t)).sqrt()
        * S::lit(1.001)
        + S::lit(1e-12);
    let step = opts.step_scale / norm_k;

    let mut x = Array1::zeros(m);
    let mut lam = Array1::zeros(k);
    let mut xb = x.clone();
    let mut lamb = lam.clone();
    let mut y1: Array1<S> = Array1::zeros(n);
    let mut y2: Array1<S> = Array1::zeros(m);
    let mut y3: Array1<S> = Array1::zeros(m);

    // rounding for penalty evaluation: snap solver dust to exact zeros so the
    // LP is not asked to cover coordinates forced to vanish
    let snap = |x: &Array1<S>| -> Array1<S> {
        let scale = S::one() + NormTag::linf().eval(x);
        x.mapv(|v| {
            if v.abs() <= S::lit(1e-10) * scale {
                S::zero()
            } else {
                v.abs()
            }
        })
    };

    let mut iters = 0;
    let mut converged = false;
    let mut gap = S::infinity();
    let mut best: Option<(S, Array1<S>)> = None;
    for it in 1..=opts.max_iters {
        iters = it;
        let (kx1, kx2, kx3) = apply_k(&xb, &lamb);
        // f1*: shift by b, project on the dual ball of the loss
        y1.zip_mut_with(&kx1, |yi, &ki| *yi += step * ki);
        y1.zip_mut_with(b, |yi, &bi| *yi -= step * bi);
        y1 = match kind {
            NormKind::L2 => prox::project_l2_ball(&y1, S::one()),
            NormKind::L1 => prox::project_linf_ball(&y1, S::one()),
            NormKind::LInf => prox::project_l1_ball(&y1, S::one()),
        };
        // f2*, f3*: conjugates of ι{·≤0} are ι{·≥0}
        y2.zip_mut_with(&kx2, |yi, &ki| *yi = (*yi + step * ki).max(S::zero()));
        y3.zip_mut_with(&kx3, |yi, &ki| *yi = (*yi + step * ki).max(S::zero()));

        let (gx, gl) = apply_kt(&y1, &y2, &y3);
        let x_new = &x - &gx.mapv(|g| step * g);
        let lam_new = Array1::from_shape_fn(k, |i| (lam[i] - step * (gl[i] + s[i])).max(S::zero()));
        xb = &x_new * S::lit(2.0) - &x;
        lamb = &lam_new * S::lit(2.0) - &lam;
        x = x_new;
        lam = lam_new;

        if it % 100 == 0 || it == opts.max_iters {
            // score a feasible rounding: the LP lifts |x| to the cheapest λ
            if let Ok((lval, _)) = polytope_penalty(t, s, &snap(&x)) {
                let obj = NormTag::from_kind(kind).eval(&(b - &a.dot(&x))) + lval;
                if best.as_ref().is_none_or(|(bv, _)| obj < *bv) {
                    best = Some((obj, x.clone()));
                }
                let best_obj = best.as_ref().unwrap().0;
                gap = best_obj - polytope_dual_bound(p, t, s, kind, &y1)?;
                if gap <= opts.rel_tol * (S::one() + best_obj.abs()) {
                    converged = true;
                    break;
                }
            }
        }
    }

    let (_, x_best) = best.ok_or(Error::BudgetInfeasible)?;
    let (lval, lam_opt) = polytope_penalty(t, s, &snap(&x_best))?;
    let obj = NormTag::from_kind(kind).eval(&(b - &a.dot(&x_best))) + lval;
    let solution = RegressionSolution {
        x: x_best.to_vec(),
        objective: obj,
        iterations: iters,
        converged,
        certificate_gap: gap,
    };
    Ok((solution, lam_opt))
}

/// Lower bound on the polytope objective from a dual-ball iterate.
///
/// `L(|x|)` is the support function of `{c ≥ 0 : Tc ≤ s}`, so a candidate `y`
/// with `‖y‖_{a*} ≤ 1` grades as a dual point once `|Aᵀy|` fits under some
/// budget vector; the largest usable fraction of `y` is found by a small LP
/// over `(θ, ρ)`: maximize `ρ` with `Tθ ≤ s`, `θ ≥ ρ·|Aᵀy|`.
fn polytope_dual_bound<S: Scalar>(
    p: &ProblemInstance<S>,
    t: &Array2<S>,
    s: &Array1<S>,
    kind: NormKind,
    y: &Array1<S>,
) -> Result<S> {
    let mut yy = y.clone();
    let dual_norm = match kind {
        NormKind::L2 => NormTag::l2().eval(&yy),
        NormKind::L1 => NormTag::linf().eval(&yy),
        NormKind::LInf => NormTag::l1().eval(&yy),
    };
    if dual_norm > S::one() {
        yy.mapv_inplace(|v| v / dual_norm);
    }
    let u = p.matrix().t().dot(&yy).mapv(|v| v.abs());
    let (k, m) = (t.nrows(), t.ncols());
    // variables (θ_1..θ_m, ρ): min -ρ  s.t.  -Tθ ≥ -s,  θ - ρ·u ≥ 0
    let mut g = Array2::zeros((k + m, m + 1));
    let mut h = Array1::zeros(k + m);
    for i in 0..k {
        for j in 0..m {
            g[[i, j]] = -t[[i, j]];
        }
        h[i] = -s[i];
    }
    for j in 0..m {
        g[[k + j, j]] = S::one();
        g[[k + j, m]] = -u[j];
    }
    let mut cost = Array1::zeros(m + 1);
    cost[m] = -S::one();
    let scale = match lp_solve(&cost, &g, &h)? {
        LpOutcome::Optimal(opt) => opt.y[m].min(S::one()),
        LpOutcome::Unbounded => S::one(),
        LpOutcome::Infeasible => S::zero(),
    };
    Ok((-p.targets().dot(&yy) * scale).max(S::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::solve_weighted_l1;
    use approx::assert_relative_eq;
    use ndarray::array;

    fn ball_constraint(radius: f64) -> ConstraintFn<f64> {
        Arc::new(move |c: &Array1<f64>| {
            let val = c.dot(c) - radius * radius;
            (val, c.mapv(|ci| 2.0 * ci))
        })
    }

    fn box_constraints(r: &Array1<f64>) -> Vec<ConstraintFn<f64>> {
        (0..r.len())
            .map(|i| {
                let ri = r[i];
                let dim = r.len();
                Arc::new(move |c: &Array1<f64>| {
                    let mut g = Array1::zeros(dim);
                    g[i] = 1.0;
                    (c[i] - ri, g)
                }) as ConstraintFn<f64>
            })
            .collect()
    }

    #[test]
    fn oracle_rejects_infeasible_witness() {
        let r = ball_constraint(1.0);
        assert!(ConvexConstraintOracle::new(vec![r], array![5.0, 0.0]).is_err());
    }

    #[test]
    fn oracle_rejects_nonconvex_function() {
        let bad: ConstraintFn<f64> =
            Arc::new(|c: &Array1<f64>| (-(c.dot(c)) + 0.5, c.mapv(|ci| -2.0 * ci)));
        assert!(ConvexConstraintOracle::new(vec![bad], array![0.0, 0.0]).is_err());
    }

    #[test]
    fn eval_v_zero_objective() {
        let oracle =
            ConvexConstraintOracle::new(vec![ball_constraint(1.0)], array![0.0, 0.0]).unwrap();
        let out = eval_v(&array![0.0], &array![0.0, 0.0], &array![0.0, 0.0], &oracle).unwrap();
        assert_eq!(out.value, Some(0.0));
    }

    #[test]
    fn eval_v_ball_constraint_closed_form() {
        // f(c) = ‖c‖² - 1, λ = 1: max gᵀc - ‖c‖² + 1 at c = g/2, value ‖g‖²/4 + 1
        let oracle =
            ConvexConstraintOracle::new(vec![ball_constraint(1.0)], array![0.0, 0.0]).unwrap();
        let kappa = array![0.6, 0.0];
        let x = array![0.0, 0.8];
        let out = eval_v(&array![1.0], &kappa, &x, &oracle).unwrap();
        let g = array![0.6, 0.8];
        let expect = g.dot(&g) / 4.0 + 1.0;
        let got = out.value.expect("finite");
        assert_relative_eq!(got, expect, epsilon = 1e-6);
        assert_relative_eq!(out.maximizer[0], 0.3, epsilon = 1e-4);
        assert_relative_eq!(out.maximizer[1], 0.4, epsilon = 1e-4);
        // value consistency with the certificate identity
        let lin = array![0.6, 0.8];
        let recon = lin.dot(&out.maximizer) - (out.maximizer.dot(&out.maximizer) - 1.0);
        assert_relative_eq!(got, recon, epsilon = 1e-8);
    }

    #[test]
    fn eval_v_flags_divergence_for_small_lambda() {
        // linear constraint c1 <= 1 with lambda too small to pay for growth
        let oracle =
            ConvexConstraintOracle::new(box_constraints(&array![1.0]), array![0.5]).unwrap();
        let out = eval_v(&array![0.5], &array![1.0], &array![0.0], &oracle).unwrap();
        assert!(out.value.is_none());
    }

    #[test]
    fn eval_v_rejects_negative_lambda() {
        let oracle =
            ConvexConstraintOracle::new(vec![ball_constraint(1.0)], array![0.0, 0.0]).unwrap();
        assert!(eval_v(&array![-0.1], &array![0.0, 0.0], &array![0.0, 0.0], &oracle).is_err());
    }

    #[test]
    fn general_box_matches_weighted_l1() {
        let p = ProblemInstance::new(
            array![[1.0, 0.2], [0.3, 0.9], [-0.2, 0.5]],
            array![1.0, -2.0, 0.5],
        )
        .unwrap();
        let radii = array![0.3, 0.6];
        let oracle =
            ConvexConstraintOracle::new(box_constraints(&radii), Array1::zeros(2)).unwrap();
        let (sol, _, _) =
            solve_general_uncertainty(&p, &oracle, &NormTag::l2(), &SolverOptions::default())
                .unwrap();
        let direct =
            solve_weighted_l1(&p, &radii, &NormTag::l2(), &SolverOptions::default()).unwrap();
        assert_relative_eq!(sol.objective, direct.objective, max_relative = 1e-3);
    }

    #[test]
    fn general_ball_matches_dual_norm_reg() {
        let p = ProblemInstance::new(
            array![[1.0, 0.2], [0.3, 0.9], [-0.2, 0.5]],
            array![1.0, -2.0, 0.5],
        )
        .unwrap();
        let l = 0.5;
        let oracle =
            ConvexConstraintOracle::new(vec![ball_constraint(l)], Array1::zeros(2)).unwrap();
        let (sol, _, _) =
            solve_general_uncertainty(&p, &oracle, &NormTag::l2(), &SolverOptions::default())
                .unwrap();
        let direct = crate::solvers::solve_dual_norm_reg(
            &p,
            &NormTag::l2(),
            &NormTag::l2(),
            l,
            &SolverOptions::default(),
        )
        .unwrap();
        assert_relative_eq!(sol.objective, direct.objective, max_relative = 1e-3);
    }

    #[test]
    fn single_feature_reduces_to_scalar_box() {
        // any coupled single-feature set acts through its max radius
        let p = ProblemInstance::new(array![[1.0], [0.0]], array![1.0, 1.0]).unwrap();
        let r = 0.5;
        let oracle = ConvexConstraintOracle::new(box_constraints(&array![r]), array![0.0]).unwrap();
        let (sol, _, _) =
            solve_general_uncertainty(&p, &oracle, &NormTag::l2(), &SolverOptions::default())
                .unwrap();
        let direct =
            solve_weighted_l1(&p, &array![r], &NormTag::l2(), &SolverOptions::default()).unwrap();
        assert_relative_eq!(sol.objective, direct.objective, max_relative = 1e-3);
    }

    #[test]
    fn polytope_identity_budget_matches_weighted_l1() {
        let p = ProblemInstance::new(
            array![[1.0, 0.2], [0.3, 0.9], [-0.2, 0.5]],
            array![1.0, -2.0, 0.5],
        )
        .unwrap();
        let s = array![0.3, 0.6];
        let t = Array2::eye(2);
        let (sol, lam) =
            solve_polytope_uncertainty(&p, &t, &s, &NormTag::l2(), &SolverOptions::default())
                .unwrap();
        let direct = solve_weighted_l1(&p, &s, &NormTag::l2(), &SolverOptions::default()).unwrap();
        assert_relative_eq!(sol.objective, direct.objective, max_relative = 1e-6);
        // λ = |x| at the identity-budget optimum
        for (&li, &xi) in lam.iter().zip(sol.x.iter()) {
            let xi: f64 = xi;
            assert_relative_eq!(li, xi.abs(), epsilon = 1e-5);
        }
    }

    #[test]
    fn polytope_zero_weights_cost_nothing() {
        let p = ProblemInstance::new(array![[1.0, 0.0], [0.0, 1.0]], array![0.0, 0.0]).unwrap();
        let t = array![[1.0, 1.0]];
        let s = array![0.5];
        let (sol, lam) = solve_polytope_uncertainty(
            &p,
            &t,
            &s,
            &NormTag::l2(),
            &SolverOptions::<f64>::default(),
        )
        .unwrap();
        assert!(sol.objective.abs() < 1e-8);
        assert!(lam.iter().all(|l| l.abs() < 1e-8));
    }

    #[test]
    fn polytope_penalty_lp_matches_hand_solution() {
        // T = I: L(w) = sᵀw with λ = w
        let t = Array2::eye(3);
        let s = array![0.5, 1.0, 2.0];
        let w = array![1.0, 0.2, 0.0];
        let (val, lam) = polytope_penalty(&t, &s, &w).unwrap();
        assert_relative_eq!(val, 0.5 + 0.2, epsilon = 1e-9);
        for (li, wi) in lam.iter().zip(w.iter()) {
            assert_relative_eq!(li, wi, epsilon = 1e-9);
        }
    }

    /// Monotonicity: enlarging s entrywise enlarges the budget polytope, so
    /// the worst case (and hence the optimal objective) can only go up.
    #[test]
    fn polytope_objective_monotone_in_s() {
        let p = ProblemInstance::new(
            array![[1.0, 0.2], [0.3, 0.9], [-0.2, 0.5]],
            array![1.0, -2.0, 0.5],
        )
        .unwrap();
        let t = array![[1.0, 0.5], [0.2, 1.0]];
        let opts = SolverOptions::default();
        let (small, _) =
            solve_polytope_uncertainty(&p, &t, &array![0.2, 0.3], &NormTag::l2(), &opts).unwrap();
        let (large, _) =
            solve_polytope_uncertainty(&p, &t, &array![0.4, 0.6], &NormTag::l2(), &opts).unwrap();
        assert!(large.objective >= small.objective - 1e-7);
    }

    #[test]
    fn uncoverable_weights_are_budget_infeasible() {
        // Tᵀλ = (λ, -λ) can never dominate a positive second coordinate
        let t = array![[1.0, -1.0]];
        let s = array![1.0];
        let err = polytope_penalty(&t, &s, &array![0.0, 0.5]);
        assert_eq!(err, Err(crate::Error::BudgetInfeasible));
    }

    #[test]
    fn negative_budget_prices_unbounded() {
        // minimizing -λ with a vacuous cover constraint runs off to infinity
        let t = array![[0.0]];
        let s = array![-1.0];
        assert!(polytope_penalty(&t, &s, &array![0.0]).is_err());
    }

    /// v is a pointwise max of affine maps of (λ, κ, x), hence convex;
    /// midpoint convexity spot-check through the approximate evaluator.
    #[test]
    fn eval_v_is_midpoint_convex() {
        let oracle =
            ConvexConstraintOracle::new(vec![ball_constraint(1.0)], array![0.0, 0.0]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let draw = |rng: &mut rand_chacha::ChaCha8Rng, lo: f64, hi: f64| {
                Array1::from_shape_fn(2, |_| rng.gen_range(lo..hi))
            };
            let (l1, l2) = (draw(&mut rng, 0.5, 2.0), draw(&mut rng, 0.5, 2.0));
            let (k1, k2) = (draw(&mut rng, 0.0, 1.0), draw(&mut rng, 0.0, 1.0));
            let (x1, x2) = (draw(&mut rng, -1.0, 1.0), draw(&mut rng, -1.0, 1.0));
            let lam1 = array![l1[0]];
            let lam2 = array![l2[0]];
            let v1 = eval_v(&lam1, &k1, &x1, &oracle).unwrap().value;
            let v2 = eval_v(&lam2, &k2, &x2, &oracle).unwrap().value;
            let vm = eval_v(
                &((&lam1 + &lam2) * 0.5),
                &((&k1 + &k2) * 0.5),
                &((&x1 + &x2) * 0.5),
                &oracle,
            )
            .unwrap()
            .value;
            let (Some(v1), Some(v2), Some(vm)) = (v1, v2, vm) else {
                continue;
            };
            // |x| is convex and enters v monotonically, so the midpoint in
            // (λ, κ, x) still satisfies the convexity bound
            assert!(
                vm <= 0.5 * (v1 + v2) + 1e-5,
                "vm {vm} vs avg {}",
                0.5 * (v1 + v2)
            );
        }
    }

    /// 2-D grid + LP oracle for a random-ish polytope instance.
    #[test]
    fn polytope_matches_grid_lp_oracle() {
        let p = ProblemInstance::new(array![[1.0, 0.4], [0.2, 0.8]], array![0.9, -0.6]).unwrap();
        let t = array![[1.0, 0.3], [0.5, 1.0]];
        let s = array![0.4, 0.7];
        let (sol, _) =
            solve_polytope_uncertainty(&p, &t, &s, &NormTag::l2(), &SolverOptions::default())
                .unwrap();
        // oracle: grid over x with the LP evaluating the penalty at every
        // point; coarse sweep first, then a 1e-3 refinement around its argmin
        let eval = |x: &Array1<f64>| -> f64 {
            let (lval, _) = polytope_penalty(&t, &s, &x.mapv(f64::abs)).unwrap();
            NormTag::l2().eval(&(p.targets() - &p.matrix().dot(x))) + lval
        };
        let sweep = |lo: (f64, f64), hi: (f64, f64), step: f64| -> (f64, (f64, f64)) {
            let mut best = (f64::INFINITY, (0.0, 0.0));
            let mut x0 = lo.0;
            while x0 <= hi.0 {
                let mut x1 = lo.1;
                while x1 <= hi.1 {
                    let obj = eval(&array![x0, x1]);
                    if obj < best.0 {
                        best = (obj, (x0, x1));
                    }
                    x1 += step;
                }
                x0 += step;
            }
            best
        };
        let (_, coarse) = sweep((-1.0, -1.0), (1.0, 1.0), 0.02);
        let (best, _) = sweep(
            (coarse.0 - 0.03, coarse.1 - 0.03),
            (coarse.0 + 0.03, coarse.1 + 0.03),
            1e-3,
        );
        assert!(
            (sol.objective - best).abs() <= 5e-3,
            "solver {} vs grid {best}",
            sol.objective
        );
    }
}
