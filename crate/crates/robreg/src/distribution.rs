//! The statistical face of the robust formulation.
//!
//! Averages of per-box suprema equal worst-case expectations over the class
//! `P_n` of measures giving every union of `k` sample boxes mass at least
//! `k/n`; specializing to hyper-rectangles around the samples turns the
//! Lasso objective into a worst-case expected generalization error. The box
//! kernel density estimator belongs to that class, which is what the
//! consistency experiment exercises.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::solve_linear;
use crate::norms::NormTag;
use crate::solvers::{solve_weighted_l1, SolverOptions};
use crate::{Error, ProblemInstance, Result, Scalar};

/// A sample or support point `(r, b)` in feature-target space.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoint<S> {
    pub features: Array1<S>,
    pub target: S,
}

impl<S: Scalar> LabeledPoint<S> {
    pub fn new(features: Array1<S>, target: S) -> Self {
        LabeledPoint { features, target }
    }
}

/// A finitely supported probability measure on feature-target space.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure<S> {
    points: Vec<LabeledPoint<S>>,
    weights: Vec<S>,
}

impl<S: Scalar> DiscreteMeasure<S> {
    pub fn new(points: Vec<LabeledPoint<S>>, weights: Vec<S>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::InvalidInput(
                "measure needs matching nonempty support".into(),
            ));
        }
        if weights.iter().any(|w| *w < S::zero()) {
            return Err(Error::InvalidInput("negative weight in measure".into()));
        }
        let total = weights.iter().fold(S::zero(), |a, &b| a + b);
        if (total - S::one()).abs() > S::lit(1e-12) {
            return Err(Error::InvalidInput("weights must sum to one".into()));
        }
        Ok(DiscreteMeasure { points, weights })
    }

    pub fn uniform(points: Vec<LabeledPoint<S>>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty support".into()));
        }
        let w = S::one() / S::from(n).unwrap();
        Self::new(points, vec![w; n])
    }

    pub fn support(&self) -> &[LabeledPoint<S>] {
        &self.points
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    /// `∫ h dμ` for a point function `h`.
    pub fn integrate(&self, h: impl Fn(&LabeledPoint<S>) -> S) -> S {
        self.points
            .iter()
            .zip(self.weights.iter())
            .fold(S::zero(), |acc, (p, &w)| acc + w * h(p))
    }
}

/// One hyper-rectangle `[b - σ, b + σ] × Π_j [r_j - δ_j, r_j + δ_j]`.
#[derive(Debug, Clone)]
pub struct BoxSet<S> {
    pub target_center: S,
    pub target_half: S,
    pub feature_center: Array1<S>,
    pub feature_half: Array1<S>,
}

impl<S: Scalar> BoxSet<S> {
    pub fn contains(&self, p: &LabeledPoint<S>, tol: S) -> bool {
        if (p.target - self.target_center).abs() > self.target_half + tol {
            return false;
        }
        p.features
            .iter()
            .zip(self.feature_center.iter().zip(self.feature_half.iter()))
            .all(|(&x, (&c, &h))| (x - c).abs() <= h + tol)
    }
}

/// The sample boxes `Z_1, …, Z_n`.
#[derive(Debug, Clone)]
pub struct BoxSets<S> {
    boxes: Vec<BoxSet<S>>,
}

impl<S: Scalar> BoxSets<S> {
    pub fn new(boxes: Vec<BoxSet<S>>) -> Result<Self> {
        if boxes.is_empty() {
            return Err(Error::InvalidInput("need at least one box".into()));
        }
        let m = boxes[0].feature_center.len();
        for b in &boxes {
            if b.feature_center.len() != m || b.feature_half.len() != m {
                return Err(Error::DimensionMismatch(
                    "box feature dimensions differ".into(),
                ));
            }
            if b.target_half < S::zero() || b.feature_half.iter().any(|h| *h < S::zero()) {
                return Err(Error::InvalidInput(
                    "half-widths must be nonnegative".into(),
                ));
            }
        }
        Ok(BoxSets { boxes })
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn boxes(&self) -> &[BoxSet<S>] {
        &self.boxes
    }

    pub fn feature_dim(&self) -> usize {
        self.boxes[0].feature_center.len()
    }
}

/// Maximize `h` over every box by corner enumeration. Valid whenever `h` is
/// convex on each box (a convex function attains its box maximum at a
/// vertex); capped at 12 features.
pub fn corner_maximizers<S: Scalar>(
    h: impl Fn(&LabeledPoint<S>) -> S,
    z: &BoxSets<S>,
) -> Result<Vec<LabeledPoint<S>>> {
    let m = z.feature_dim();
    if m > 12 {
        return Err(Error::InvalidInput(
            "corner enumeration capped at 12 features".into(),
        ));
    }
    let dims = m + 1;
    let mut out = Vec::with_capacity(z.len());
    for b in z.boxes() {
        let mut best: Option<(S, LabeledPoint<S>)> = None;
        for mask in 0u32..(1u32 << dims) {
            let target = if mask & 1 == 0 {
                b.target_center - b.target_half
            } else {
                b.target_center + b.target_half
            };
            let features = Array1::from_shape_fn(m, |j| {
                if mask & (1 << (j + 1)) == 0 {
                    b.feature_center[j] - b.feature_half[j]
                } else {
                    b.feature_center[j] + b.feature_half[j]
                }
            });
            let p = LabeledPoint::new(features, target);
            let val = h(&p);
            if best.as_ref().is_none_or(|(bv, _)| val > *bv) {
                best = Some((val, p));
            }
        }
        out.push(best.unwrap().1);
    }
    Ok(out)
}

/// The sup-averaging identity: with `maximizers[i]` an (ε-)maximizer of `h`
/// over `Z_i`, the uniform measure on them lies in `P_n` and integrates `h`
/// to the average of the per-box suprema, which equals the supremum over all
/// of `P_n`. Returns `(average, witness)` after certifying the membership
/// condition `μ(∪_{i∈T} Z_i) ≥ |T|/n` (exhaustively for n ≤ 12, on 1000
/// seeded random subsets otherwise).
pub fn per_set_sup_identity<S: Scalar>(
    h: impl Fn(&LabeledPoint<S>) -> S,
    z: &BoxSets<S>,
    maximizers: &[LabeledPoint<S>],
) -> Result<(S, DiscreteMeasure<S>)> {
    let n = z.len();
    if maximizers.len() != n {
        return Err(Error::DimensionMismatch(
            "one maximizer per box required".into(),
        ));
    }
    for (i, (p, b)) in maximizers.iter().zip(z.boxes()).enumerate() {
        if !b.contains(p, S::lit(1e-12)) {
            return Err(Error::InvalidInput(format!(
                "maximizer {i} outside its box"
            )));
        }
    }
    let left = maximizers.iter().fold(S::zero(), |acc, p| acc + h(p)) / S::from(n).unwrap();
    let witness = DiscreteMeasure::uniform(maximizers.to_vec())?;

    let mass_of_union = |subset: &[usize]| -> S {
        let mut mass = S::zero();
        for (p, &w) in witness.support().iter().zip(witness.weights()) {
            if subset
                .iter()
                .any(|&i| z.boxes()[i].contains(p, S::lit(1e-12)))
            {
                mass += w;
            }
        }
        mass
    };
    let required = |k: usize| S::from(k).unwrap() / S::from(n).unwrap();
    if n <= 12 {
        for mask in 1usize..(1 << n) {
            let subset: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            if mass_of_union(&subset) < required(subset.len()) - S::lit(1e-12) {
                return Err(Error::ConstructionViolated(format!(
                    "witness fails P_n membership on subset {subset:?}"
                )));
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0xbeef);
        for _ in 0..1000 {
            let subset: Vec<usize> = (0..n).filter(|_| rng.gen::<bool>()).collect();
            if subset.is_empty() {
                continue;
            }
            if mass_of_union(&subset) < required(subset.len()) - S::lit(1e-12) {
                return Err(Error::ConstructionViolated(
                    "witness fails P_n membership on a sampled subset".into(),
                ));
            }
        }
    }
    Ok((left, witness))
}

/// Output of the worst-case-expected-loss identity.
#[derive(Debug, Clone)]
pub struct DistributionalIdentity<S> {
    /// `‖b - Ax‖₂ + √n·c_n·‖x‖₁ + √n·c_n`
    pub lhs: S,
    /// `sqrt(n ∫ (b' - r'ᵀx)² dμ*)` for the constructed witness measure.
    pub attained: S,
    pub witness: DiscreteMeasure<S>,
    pub boxes: BoxSets<S>,
}

/// Realize the identity between the Lasso-style objective and the worst-case
/// root expected squared error over `P̂(n)`.
///
/// The half-width budget (`‖σ‖₂ ≤ √n·c_n`, `‖δ_j‖₂ ≤ √n·c_n` per feature) is
/// allocated along the residual direction — the same construction that proves
/// the robust equivalence — and then polished by a short coordinate
/// refinement. The attained value can never exceed `lhs`; the allocation
/// search is expected to close the gap to well under 1%.
pub fn lasso_distributional_identity<S: Scalar>(
    p: &ProblemInstance<S>,
    x: &Array1<S>,
    c_n: S,
) -> Result<DistributionalIdentity<S>> {
    if c_n < S::zero() || !c_n.is_finite() {
        return Err(Error::InvalidInput("bandwidth must be nonnegative".into()));
    }
    let n = p.n();
    let budget = S::from(n).unwrap().sqrt() * c_n;
    let res = p.residual(x)?;
    let l1 = NormTag::l1().eval(x);
    let lhs = NormTag::l2().eval(&res) + budget * l1 + budget;

    // per-sample allocation direction on the unit sphere, v >= 0
    let mut v = {
        let norm = NormTag::l2().eval(&res);
        if norm == S::zero() {
            let mut e = Array1::zeros(n);
            e[0] = S::one();
            e
        } else {
            res.mapv(|r| r.abs() / norm)
        }
    };

    let attained_for = |v: &Array1<S>| -> Result<(S, BoxSets<S>, Vec<LabeledPoint<S>>)> {
        let boxes: Vec<BoxSet<S>> = (0..n)
            .map(|i| BoxSet {
                target_center: p.targets()[i],
                target_half: budget * v[i],
                feature_center: p.row(i).to_owned(),
                feature_half: Array1::from_elem(p.m(), budget * v[i]),
            })
            .collect();
        let sets = BoxSets::new(boxes)?;
        let h = |pt: &LabeledPoint<S>| {
            let e = pt.target - pt.features.dot(x);
            e * e
        };
        let maxima = if p.m() <= 12 {
            corner_maximizers(h, &sets)?
        } else {
            // the optimizing corner is known in closed form: push the target
            // with the residual sign and each feature against sgn(x_j)
            (0..n)
                .map(|i| {
                    let sres = if res[i] >= S::zero() {
                        S::one()
                    } else {
                        -S::one()
                    };
                    let features = Array1::from_shape_fn(p.m(), |j| {
                        // push each feature against sgn(x_j); for x_j = 0 the
                        // corner choice is immaterial
                        let sx = if x[j] > S::zero() {
                            -S::one()
                        } else {
                            S::one()
                        };
                        p.matrix()[[i, j]] + sres * sx * budget * v[i]
                    });
                    LabeledPoint::new(features, p.targets()[i] + sres * budget * v[i])
                })
                .collect()
        };
        let total = maxima.iter().fold(S::zero(), |acc, pt| acc + h(pt));
        Ok((total.sqrt(), sets, maxima))
    };

    let (mut best_val, mut best_sets, mut best_max) = attained_for(&v)?;
    // coordinate refinement of the direction, renormalized onto the sphere
    let mut step = S::lit(0.25);
    for _ in 0..3 {
        for i in 0..n {
            for delta in [step, -step] {
                let mut trial = v.clone();
                trial[i] = (trial[i] + delta).max(S::zero());
                let norm = NormTag::l2().eval(&trial);
                if norm == S::zero() {
                    continue;
                }
                trial.mapv_inplace(|t| t / norm);
                let (val, sets, maxima) = attained_for(&trial)?;
                if val > best_val {
                    best_val = val;
                    best_sets = sets;
                    best_max = maxima;
                    v = trial;
                }
            }
        }
        step *= S::lit(0.5);
    }

    let witness = DiscreteMeasure::uniform(best_max)?;
    Ok(DistributionalIdentity {
        lhs,
        attained: best_val,
        witness,
        boxes: best_sets,
    })
}

/// Box-kernel density estimate on feature-target space.
#[derive(Debug, Clone)]
pub struct KdeEstimate<S> {
    /// One row per sample: `(b, r_1, …, r_m)`.
    samples: Array2<S>,
    bandwidth: S,
}

impl<S: Scalar> KdeEstimate<S> {
    pub fn new(samples: Array2<S>, bandwidth: S) -> Result<Self> {
        if samples.nrows() == 0 || samples.ncols() == 0 {
            return Err(Error::InvalidInput("KDE needs at least one sample".into()));
        }
        if bandwidth <= S::zero() || !bandwidth.is_finite() {
            return Err(Error::InvalidInput("bandwidth must be positive".into()));
        }
        Ok(KdeEstimate { samples, bandwidth })
    }

    pub fn from_points(points: &[LabeledPoint<S>], bandwidth: S) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("KDE needs at least one sample".into()));
        }
        let m = points[0].features.len();
        let samples = Array2::from_shape_fn((points.len(), m + 1), |(i, j)| {
            if j == 0 {
                points[i].target
            } else {
                points[i].features[j - 1]
            }
        });
        Self::new(samples, bandwidth)
    }

    pub fn len(&self) -> usize {
        self.samples.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.nrows() == 0
    }

    pub fn dimension(&self) -> usize {
        self.samples.ncols()
    }

    pub fn bandwidth(&self) -> S {
        self.bandwidth
    }

    /// Density at a point (coordinates ordered as the samples): the box
    /// kernel counts boundary points as inside.
    pub fn density(&self, point: &Array1<S>) -> Result<S> {
        let d = self.dimension();
        if point.len() != d {
            return Err(Error::DimensionMismatch("KDE point dimension".into()));
        }
        let n = self.samples.nrows();
        let c = self.bandwidth;
        let mut hits = S::zero();
        for i in 0..n {
            let inside = (0..d).all(|j| ((point[j] - self.samples[[i, j]]) / c).abs() <= S::one());
            if inside {
                hits += S::one();
            }
        }
        let cell = (S::lit(2.0) * c).powi(d as i32);
        Ok(hits / (S::from(n).unwrap() * cell))
    }

    /// Exact mass of the estimate inside an axis-aligned rectangle
    /// `[lo, hi]`, by box-overlap algebra: each kernel box carries mass
    /// `1/n` spread uniformly. Boxes fully inside the rectangle are counted
    /// integrally, so a rectangle covering every box reports exactly one.
    pub fn mass_in_rect(&self, lo: &Array1<S>, hi: &Array1<S>) -> Result<S> {
        let d = self.dimension();
        if lo.len() != d || hi.len() != d {
            return Err(Error::DimensionMismatch("rectangle dimension".into()));
        }
        let n = self.samples.nrows();
        let c = self.bandwidth;
        let width = S::lit(2.0) * c;
        let mut fully_inside = 0usize;
        let mut partial = S::zero();
        for i in 0..n {
            let contained = (0..d)
                .all(|j| lo[j] <= self.samples[[i, j]] - c && self.samples[[i, j]] + c <= hi[j]);
            if contained {
                fully_inside += 1;
                continue;
            }
            let mut frac = S::one();
            for j in 0..d {
                let a = (self.samples[[i, j]] - c).max(lo[j]);
                let b = (self.samples[[i, j]] + c).min(hi[j]);
                let overlap = (b - a).max(S::zero());
                frac = frac * overlap / width;
            }
            partial += frac;
        }
        Ok((S::from(fully_inside).unwrap() + partial) / S::from(n).unwrap())
    }
}

/// Free-function form of [`KdeEstimate::density`].
pub fn kde_density<S: Scalar>(est: &KdeEstimate<S>, point: &Array1<S>) -> Result<S> {
    est.density(point)
}

/// The bandwidth schedule `c_n = n^{-1/(2(m+1))}`, which satisfies both
/// limits required for consistency (`c_n ↓ 0`, `n·c_n^{m+1} → ∞`).
pub fn default_bandwidth<S: Scalar>(n: usize, m: usize) -> S {
    let exponent = -1.0 / (2.0 * (m as f64 + 1.0));
    S::lit((n as f64).powf(exponent))
}

/// Sample generators with analytically known second moments, so population
/// least squares and prediction errors come in closed form.
pub trait MomentGenerator<S: Scalar> {
    fn dimension(&self) -> usize;
    fn sample(&self, rng: &mut ChaCha8Rng) -> LabeledPoint<S>;
    /// `E[r rᵀ]`
    fn feature_second_moment(&self) -> Array2<S>;
    /// `E[r b]`
    fn cross_moment(&self) -> Array1<S>;
    /// `E[b²]`
    fn target_second_moment(&self) -> S;

    /// Population least squares `x(P) = E[rrᵀ]⁻¹ E[rb]`.
    fn population_optimum(&self) -> Result<Array1<S>> {
        solve_linear(&self.feature_second_moment(), &self.cross_moment())
    }

    /// Root expected squared prediction error of a candidate weight vector.
    fn rms_prediction_error(&self, x: &Array1<S>) -> S {
        let exx = self.feature_second_moment();
        let quad = x.dot(&exx.dot(x));
        let val = self.target_second_moment() - S::lit(2.0) * x.dot(&self.cross_moment()) + quad;
        val.max(S::zero()).sqrt()
    }
}

/// Bounded-support linear model: features uniform on `[-w, w]^m`, target
/// `x₀ᵀr + ξ` with `ξ` uniform on `[-g, g]`.
#[derive(Debug, Clone)]
pub struct UniformLinearGenerator<S> {
    pub true_weights: Array1<S>,
    pub feature_halfwidth: S,
    pub noise_halfwidth: S,
}

impl<S: Scalar> MomentGenerator<S> for UniformLinearGenerator<S> {
    fn dimension(&self) -> usize {
        self.true_weights.len()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> LabeledPoint<S> {
        let m = self.dimension();
        let w = self.feature_halfwidth;
        let features = Array1::from_shape_fn(m, |_| S::lit(rng.gen_range(-1.0..=1.0)) * w);
        let noise = S::lit(rng.gen_range(-1.0..=1.0)) * self.noise_halfwidth;
        let target = self.true_weights.dot(&features) + noise;
        LabeledPoint::new(features, target)
    }

    fn feature_second_moment(&self) -> Array2<S> {
        let m = self.dimension();
        let var = self.feature_halfwidth * self.feature_halfwidth / S::lit(3.0);
        Array2::from_diag(&Array1::from_elem(m, var))
    }

    fn cross_moment(&self) -> Array1<S> {
        self.feature_second_moment().dot(&self.true_weights)
    }

    fn target_second_moment(&self) -> S {
        let signal = self
            .true_weights
            .dot(&self.feature_second_moment().dot(&self.true_weights));
        signal + self.noise_halfwidth * self.noise_halfwidth / S::lit(3.0)
    }
}

/// One row of the consistency experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConsistencyRow<S> {
    pub n: usize,
    pub c_n: S,
    /// Root expected squared error of the fitted weights under the generator.
    pub prediction_error: S,
    /// Same for the population optimum.
    pub oracle_error: S,
    /// `‖x(c_n, S_n)‖₂`, recorded so the boundedness assumption is visible.
    pub fitted_norm: S,
    pub converged: bool,
}

/// Fit `argmin sqrt(Σ(bᵢ - rᵢᵀx)²/n) + c_n‖x‖₁` on samples drawn from the
/// generator at each schedule point and report closed-form prediction errors.
/// Rows are seeded independently.
pub fn consistency_experiment<S: Scalar, G: MomentGenerator<S>>(
    generator: &G,
    n_schedule: &[usize],
    c_schedule: &[S],
    opts: &SolverOptions<S>,
    seed: u64,
) -> Result<Vec<ConsistencyRow<S>>> {
    if n_schedule.len() != c_schedule.len() || n_schedule.is_empty() {
        return Err(Error::InvalidInput(
            "schedules must align and be nonempty".into(),
        ));
    }
    let oracle = generator.population_optimum()?;
    let oracle_error = generator.rms_prediction_error(&oracle);
    let m = generator.dimension();
    let mut rows = Vec::with_capacity(n_schedule.len());
    for (row, (&n, &c_n)) in n_schedule.iter().zip(c_schedule.iter()).enumerate() {
        if n == 0 {
            return Err(Error::InvalidInput("schedule contains n = 0".into()));
        }
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed.wrapping_add((row as u64).wrapping_mul(0x9e3779b9)));
        let mut a = Array2::zeros((n, m));
        let mut b = Array1::zeros(n);
        for i in 0..n {
            let pt = generator.sample(&mut rng);
            for j in 0..m {
                a[[i, j]] = pt.features[j];
            }
            b[i] = pt.target;
        }
        let p = ProblemInstance::new(a, b)?;
        // minimizing ‖b - Ax‖₂ + √n·c_n·‖x‖₁ is the stated objective scaled
        // by √n, so the argmin matches
        let radius = S::from(n).unwrap().sqrt() * c_n;
        let c = Array1::from_elem(m, radius);
        let sol = solve_weighted_l1(&p, &c, &NormTag::l2(), opts)?;
        let x = sol.weights();
        rows.push(ConsistencyRow {
            n,
            c_n,
            prediction_error: generator.rms_prediction_error(&x),
            oracle_error,
            fitted_norm: NormTag::l2().eval(&x),
            converged: sol.converged,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::array;

    fn quad_loss(x: &Array1<f64>) -> impl Fn(&LabeledPoint<f64>) -> f64 + '_ {
        move |p: &LabeledPoint<f64>| {
            let e = p.target - p.features.dot(x);
            e * e
        }
    }

    #[test]
    fn single_box_identity_is_the_supremum() {
        let sets = BoxSets::new(vec![BoxSet {
            target_center: 1.0,
            target_half: 0.5,
            feature_center: array![0.0],
            feature_half: array![1.0],
        }])
        .unwrap();
        let x = array![2.0];
        let h = quad_loss(&x);
        let maxima = corner_maximizers(&h, &sets).unwrap();
        let (left, witness) = per_set_sup_identity(&h, &sets, &maxima).unwrap();
        // sup of (b - 2r)² over the box: target 1.5, r = -1 => 3.5² = 12.25
        assert_relative_eq!(left, 12.25, epsilon = 1e-12);
        assert_eq!(witness.support().len(), 1);
    }

    #[test]
    fn constant_h_averages_to_the_constant() {
        let boxes: Vec<BoxSet<f64>> = (0..4)
            .map(|i| BoxSet {
                target_center: i as f64,
                target_half: 0.3,
                feature_center: array![0.0, 0.0],
                feature_half: array![0.1, 0.2],
            })
            .collect();
        let sets = BoxSets::new(boxes).unwrap();
        let h = |_: &LabeledPoint<f64>| 7.5;
        let maxima = corner_maximizers(h, &sets).unwrap();
        let (left, _) = per_set_sup_identity(h, &sets, &maxima).unwrap();
        assert_relative_eq!(left, 7.5, epsilon = 1e-12);
    }

    #[test]
    fn measure_constructor_validates_weights() {
        let pts = vec![
            LabeledPoint::new(array![0.0], 1.0),
            LabeledPoint::new(array![1.0], 2.0),
        ];
        assert!(DiscreteMeasure::new(pts.clone(), vec![0.5, 0.5]).is_ok());
        assert!(DiscreteMeasure::new(pts.clone(), vec![0.7, 0.5]).is_err());
        assert!(DiscreteMeasure::new(pts.clone(), vec![-0.5, 1.5]).is_err());
        assert!(DiscreteMeasure::new(pts, vec![1.0]).is_err());
        assert!(DiscreteMeasure::<f64>::new(vec![], vec![]).is_err());
    }

    #[test]
    fn membership_sampling_path_beyond_twelve_boxes() {
        // n = 15 exercises the random-subset certification branch
        let boxes: Vec<BoxSet<f64>> = (0..15)
            .map(|i| BoxSet {
                target_center: i as f64,
                target_half: 0.4,
                feature_center: array![0.0],
                feature_half: array![1.0],
            })
            .collect();
        let sets = BoxSets::new(boxes).unwrap();
        let h = |p: &LabeledPoint<f64>| p.target;
        let maxima = corner_maximizers(h, &sets).unwrap();
        let (left, witness) = per_set_sup_identity(h, &sets, &maxima).unwrap();
        // sup over box i is i + 0.4; the average follows
        let expect: f64 = (0..15).map(|i| i as f64 + 0.4).sum::<f64>() / 15.0;
        assert_relative_eq!(left, expect, epsilon = 1e-12);
        assert_eq!(witness.support().len(), 15);
    }

    #[test]
    fn maximizer_outside_box_is_rejected() {
        let sets = BoxSets::new(vec![BoxSet {
            target_center: 0.0,
            target_half: 0.1,
            feature_center: array![0.0],
            feature_half: array![0.1],
        }])
        .unwrap();
        let bad = vec![LabeledPoint::new(array![5.0], 0.0)];
        let h = |_: &LabeledPoint<f64>| 0.0;
        assert!(per_set_sup_identity(h, &sets, &bad).is_err());
    }

    #[test]
    fn corner_maxima_match_grid_search() {
        // n = 3, m = 1, h = squared residual at a fixed x0
        let x0 = array![0.7];
        let boxes: Vec<BoxSet<f64>> = [
            (0.4, 0.25, -0.3, 0.5),
            (-0.9, 0.1, 0.8, 0.2),
            (1.3, 0.3, 0.1, 0.4),
        ]
        .iter()
        .map(|&(bc, bh, rc, rh)| BoxSet {
            target_center: bc,
            target_half: bh,
            feature_center: array![rc],
            feature_half: array![rh],
        })
        .collect();
        let sets = BoxSets::new(boxes).unwrap();
        let h = quad_loss(&x0);
        let corner = corner_maximizers(&h, &sets).unwrap();
        for (b, cmax) in sets.boxes().iter().zip(&corner) {
            // dense grid over the box, corners included
            let mut best = f64::NEG_INFINITY;
            let steps = 200;
            for ti in 0..=steps {
                let t = b.target_center - b.target_half
                    + 2.0 * b.target_half * ti as f64 / steps as f64;
                for ri in 0..=steps {
                    let r = b.feature_center[0] - b.feature_half[0]
                        + 2.0 * b.feature_half[0] * ri as f64 / steps as f64;
                    best = best.max(h(&LabeledPoint::new(array![r], t)));
                }
            }
            assert_relative_eq!(h(cmax), best, epsilon = 1e-9);
        }
        let (left, _witness) = per_set_sup_identity(&h, &sets, &corner).unwrap();
        assert!(left > 0.0);
    }

    #[test]
    fn identity_with_zero_weights() {
        let p = ProblemInstance::new(array![[0.5], [-0.2], [0.1]], array![1.0, -0.5, 0.3]).unwrap();
        let x = array![0.0];
        let c_n = 0.4;
        let out = lasso_distributional_identity(&p, &x, c_n).unwrap();
        let budget = 3.0_f64.sqrt() * c_n;
        let expect = NormTag::l2().eval(p.targets()) + budget;
        assert_relative_eq!(out.lhs, expect, epsilon = 1e-12);
        assert!(out.attained <= out.lhs + 1e-8);
        assert_relative_eq!(out.attained, out.lhs, max_relative = 1e-9);
    }

    #[test]
    fn identity_with_zero_bandwidth() {
        let p = ProblemInstance::new(array![[0.5], [-0.2]], array![1.0, -0.5]).unwrap();
        let x = array![0.8];
        let out = lasso_distributional_identity(&p, &x, 0.0).unwrap();
        let res_norm = NormTag::l2().eval(&p.residual(&x).unwrap());
        assert_relative_eq!(out.lhs, res_norm, epsilon = 1e-12);
        assert_relative_eq!(out.attained, res_norm, epsilon = 1e-12);
    }

    #[test]
    fn allocation_search_attains_the_identity() {
        let p = ProblemInstance::new(array![[0.9], [0.2]], array![0.4, -1.1]).unwrap();
        let x = array![-0.6];
        let out = lasso_distributional_identity(&p, &x, 0.3).unwrap();
        assert!(out.attained <= out.lhs + 1e-8);
        assert!(
            out.attained >= out.lhs * 0.99,
            "attained {} lhs {}",
            out.attained,
            out.lhs
        );
        // the witness measure integrates to the attained value
        let integral: f64 = out.witness.integrate(|pt| {
            let e = pt.target - pt.features.dot(&x);
            e * e
        });
        assert_relative_eq!((2.0 * integral).sqrt(), out.attained, epsilon = 1e-9);
    }

    #[test]
    fn kde_point_values() {
        // single sample at the origin of R^1 (m = 0), bandwidth 1
        let est = KdeEstimate::new(array![[0.0]], 1.0).unwrap();
        assert_relative_eq!(est.density(&array![0.0]).unwrap(), 0.5);
        // boundary counts as inside
        assert_relative_eq!(est.density(&array![1.0]).unwrap(), 0.5);
        assert_relative_eq!(est.density(&array![1.01]).unwrap(), 0.0);
    }

    #[test]
    fn kde_total_mass_is_one() {
        let pts: Vec<LabeledPoint<f64>> = (0..7)
            .map(|i| LabeledPoint::new(array![0.1 * i as f64], (i as f64).sin()))
            .collect();
        let est = KdeEstimate::from_points(&pts, 0.37).unwrap();
        let lo = array![-100.0, -100.0];
        let hi = array![100.0, 100.0];
        assert_relative_eq!(est.mass_in_rect(&lo, &hi).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn kde_l1_error_to_uniform_shrinks_with_n() {
        // samples uniform on [0,1]² (m = 1), schedule c_n = n^{-1/4}
        let mut errors = Vec::new();
        for &n in &[100usize, 400, 1600] {
            let mut rng = ChaCha8Rng::seed_from_u64(77);
            let pts: Vec<LabeledPoint<f64>> = (0..n)
                .map(|_| LabeledPoint::new(array![rng.gen::<f64>()], rng.gen::<f64>()))
                .collect();
            let est = KdeEstimate::from_points(&pts, default_bandwidth(n, 1)).unwrap();
            let grid = 40;
            let mut l1 = 0.0;
            for i in 0..grid {
                for j in 0..grid {
                    let pt = array![
                        (i as f64 + 0.5) / grid as f64,
                        (j as f64 + 0.5) / grid as f64
                    ];
                    let f = est.density(&pt).unwrap();
                    l1 += (f - 1.0).abs() / (grid * grid) as f64;
                }
            }
            errors.push(l1);
        }
        assert!(
            errors[0] > errors[1] && errors[1] > errors[2],
            "L1 errors not decreasing: {errors:?}"
        );
    }

    #[test]
    fn population_optimum_matches_true_weights() {
        let gen = UniformLinearGenerator {
            true_weights: array![1.5, -2.0],
            feature_halfwidth: 3.0,
            noise_halfwidth: 3.0_f64.sqrt(),
        };
        let opt = gen.population_optimum().unwrap();
        assert_relative_eq!(opt[0], 1.5, epsilon = 1e-12);
        assert_relative_eq!(opt[1], -2.0, epsilon = 1e-12);
        assert_relative_eq!(gen.rms_prediction_error(&opt), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn noiseless_interpolation_has_zero_error() {
        let gen = UniformLinearGenerator {
            true_weights: array![0.7, -0.4],
            feature_halfwidth: 1.0,
            noise_halfwidth: 0.0,
        };
        let rows =
            consistency_experiment(&gen, &[8], &[0.0], &SolverOptions::default(), 3).unwrap();
        assert!(rows[0].converged);
        assert!(
            rows[0].prediction_error < 1e-5,
            "error {}",
            rows[0].prediction_error
        );
        assert_relative_eq!(rows[0].oracle_error, 0.0, epsilon = 1e-12);
    }
}
