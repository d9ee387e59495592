//! Moment-based bounds on disturbance magnitude.
//!
//! Knowing only the mean `a` and second moment `Σ` of a random vector `v`,
//! the probability `Pr{‖v‖₂ ≥ c}` is bounded by the value of a small
//! semidefinite program over a quadratic witness `f(v) = vᵀPv + 2qᵀv + r`
//! that dominates the indicator of the event: `f ⪰ 0` everywhere (first LMI)
//! and `f ⪰ 1` on `‖v‖₂ ≥ c` (S-procedure, second LMI). Any feasible
//! `(P, q, r, λ)` is a valid upper bound, so the solver here only ever
//! improves on the closed-form Chebyshev point `P = I/c²`.

use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{min_eigenvalue, project_psd};
use crate::{Error, Result, Scalar};

/// First and second moments of a disturbance vector, validated at
/// construction: `Σ` symmetric PSD with `Σ - aaᵀ ⪰ 0` (both to `1e-10`).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentInfo<S> {
    mean: Array1<S>,
    second_moment: Array2<S>,
}

impl<S: Scalar> MomentInfo<S> {
    pub fn new(mean: Array1<S>, second_moment: Array2<S>) -> Result<Self> {
        let n = mean.len();
        if second_moment.nrows() != n || second_moment.ncols() != n {
            return Err(Error::DimensionMismatch(
                "mean vs second-moment shape".into(),
            ));
        }
        let scale = second_moment
            .iter()
            .fold(S::one(), |acc, &v| acc.max(v.abs()));
        for i in 0..n {
            for j in (i + 1)..n {
                let gap = (second_moment[[i, j]] - second_moment[[j, i]]).abs();
                if gap > S::lit(1e-10) * scale {
                    return Err(Error::InvalidMoments(
                        "second moment is not symmetric".into(),
                    ));
                }
            }
        }
        if min_eigenvalue(&second_moment) < -S::lit(1e-10) * scale {
            return Err(Error::InvalidMoments("second moment is not PSD".into()));
        }
        let mut cov = second_moment.clone();
        for i in 0..n {
            for j in 0..n {
                cov[[i, j]] -= mean[i] * mean[j];
            }
        }
        if min_eigenvalue(&cov) < -S::lit(1e-10) * scale {
            return Err(Error::InvalidMoments("Σ - aaᵀ is not PSD".into()));
        }
        Ok(MomentInfo {
            mean,
            second_moment,
        })
    }

    pub fn dimension(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &Array1<S> {
        &self.mean
    }

    pub fn second_moment(&self) -> &Array2<S> {
        &self.second_moment
    }

    fn trace(&self) -> S {
        self.second_moment
            .diag()
            .iter()
            .fold(S::zero(), |a, &b| a + b)
    }

    /// The moment matrix `W = [[Σ, a], [aᵀ, 1]]` the bound is linear in.
    fn witness_matrix(&self) -> Array2<S> {
        let n = self.dimension();
        let mut w = Array2::zeros((n + 1, n + 1));
        for i in 0..n {
            for j in 0..n {
                w[[i, j]] = self.second_moment[[i, j]];
            }
            w[[i, n]] = self.mean[i];
            w[[n, i]] = self.mean[i];
        }
        w[[n, n]] = S::one();
        w
    }
}

/// A feasible point of the moment SDP together with its objective value.
/// The value upper-bounds `Pr{‖v‖₂ ≥ c}` for every distribution matching the
/// moments (and for every distribution whose second moment is dominated by
/// them).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundCertificate<S> {
    pub p: Vec<Vec<S>>,
    pub q: Vec<S>,
    pub r: S,
    pub lambda: S,
    /// Raw objective `Tr(ΣP) + 2qᵀa + r`; may exceed 1 where the bound is
    /// vacuous.
    pub value: S,
}

impl<S: Scalar> BoundCertificate<S> {
    /// The certified probability bound, clamped into `[0, 1]` for reporting.
    pub fn probability(&self) -> S {
        self.value.max(S::zero()).min(S::one())
    }

    fn big_m(&self) -> Array2<S> {
        let n = self.q.len();
        let mut m = Array2::zeros((n + 1, n + 1));
        for i in 0..n {
            for j in 0..n {
                m[[i, j]] = self.p[i][j];
            }
            m[[i, n]] = self.q[i];
            m[[n, i]] = self.q[i];
        }
        m[[n, n]] = self.r;
        m
    }

    /// Re-check both linear matrix inequalities and the value identity by
    /// eigenvalue computation.
    pub fn verify(&self, moments: &MomentInfo<S>, c: S, slack: S) -> bool {
        let n = moments.dimension();
        if self.q.len() != n || self.lambda < S::zero() {
            return false;
        }
        let m = self.big_m();
        if min_eigenvalue(&m) < -slack {
            return false;
        }
        // λ·[[P, q],[qᵀ, r-1]] - [[I, 0],[0, -c²]] ⪰ 0
        let mut shifted = m.mapv(|v| v * self.lambda);
        shifted[[n, n]] -= self.lambda;
        for i in 0..n {
            shifted[[i, i]] -= S::one();
        }
        shifted[[n, n]] += c * c;
        if min_eigenvalue(&shifted) < -slack {
            return false;
        }
        let w = moments.witness_matrix();
        let value = frobenius_inner(&w, &m);
        (value - self.value).abs() <= S::lit(1e-10) * (S::one() + self.value.abs())
    }
}

fn frobenius_inner<S: Scalar>(a: &Array2<S>, b: &Array2<S>) -> S {
    a.iter()
        .zip(b.iter())
        .fold(S::zero(), |acc, (&x, &y)| acc + x * y)
}

fn certificate_from_m<S: Scalar>(m: &Array2<S>, lambda: S, w: &Array2<S>) -> BoundCertificate<S> {
    let n = m.nrows() - 1;
    let p: Vec<Vec<S>> = (0..n)
        .map(|i| (0..n).map(|j| m[[i, j]]).collect())
        .collect();
    let q: Vec<S> = (0..n).map(|i| m[[i, n]]).collect();
    BoundCertificate {
        p,
        q,
        r: m[[n, n]],
        lambda,
        value: frobenius_inner(w, m),
    }
}

/// The always-feasible Chebyshev point `P = I/c², q = 0, r = 0, λ = c²`
/// with value `Tr(Σ)/c²`.
fn chebyshev_certificate<S: Scalar>(moments: &MomentInfo<S>, c: S) -> BoundCertificate<S> {
    let n = moments.dimension();
    let inv = S::one() / (c * c);
    let p: Vec<Vec<S>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { inv } else { S::zero() })
                .collect()
        })
        .collect();
    BoundCertificate {
        p,
        q: vec![S::zero(); n],
        r: S::zero(),
        lambda: c * c,
        value: moments.trace() * inv,
    }
}

/// For λ ≥ c² the constraint set collapses onto `M ⪰ G(λ)` with `G` PSD, so
/// the optimum is `M = G` in closed form.
fn large_lambda_certificate<S: Scalar>(
    moments: &MomentInfo<S>,
    c: S,
    lambda: S,
) -> BoundCertificate<S> {
    let n = moments.dimension();
    let w = moments.witness_matrix();
    let mut g = Array2::zeros((n + 1, n + 1));
    for i in 0..n {
        g[[i, i]] = S::one() / lambda;
    }
    g[[n, n]] = S::one() - c * c / lambda;
    certificate_from_m(&g, lambda, &w)
}

/// Shift matrix `G(λ) = diag(I/λ, 1 - c²/λ)`; the second LMI reads `M ⪰ G`.
fn shift_matrix<S: Scalar>(n: usize, c: S, lambda: S) -> Array2<S> {
    let mut g = Array2::zeros((n + 1, n + 1));
    for i in 0..n {
        g[[i, i]] = S::one() / lambda;
    }
    g[[n, n]] = S::one() - c * c / lambda;
    g
}

/// Dykstra's alternating projections onto `{M ⪰ 0} ∩ {M ⪰ G}`.
fn dykstra_project<S: Scalar>(m0: &Array2<S>, g: &Array2<S>, rounds: usize) -> Array2<S> {
    let mut x = m0.clone();
    let mut p = Array2::zeros(m0.dim());
    let mut q = Array2::zeros(m0.dim());
    for _ in 0..rounds {
        let y = project_psd(&(&x + &p));
        p = &x + &p - &y;
        let shifted = &y + &q - g;
        let x_new = g + &project_psd(&shifted);
        q = &y + &q - &x_new;
        x = x_new;
    }
    x
}

fn lmi_slack<S: Scalar>(m: &Array2<S>, g: &Array2<S>) -> S {
    let e1 = min_eigenvalue(m);
    let e2 = min_eigenvalue(&(m - g));
    e1.min(e2)
}

/// Inner problem for fixed λ: minimize `⟨W, M⟩` over `M ⪰ 0, M ⪰ G(λ)` by
/// projected gradient with Dykstra projections, tracking the best verified
/// iterate. Returns the best feasible `M` found and its value.
fn inner_minimize<S: Scalar>(
    w: &Array2<S>,
    g: &Array2<S>,
    start: &Array2<S>,
    max_iters: usize,
) -> (Array2<S>, S) {
    let w_norm = frobenius_inner(w, w).sqrt() + S::lit(1e-12);
    let feas_tol = S::lit(-1e-9);
    let mut m = start.clone();
    let mut best = (start.clone(), frobenius_inner(w, start));
    let mut stall = 0usize;
    for k in 1..=max_iters {
        let step = S::lit(2.0) / (w_norm * S::from(k).unwrap().sqrt());
        let trial = &m - &w.mapv(|wi| wi * step);
        m = dykstra_project(&trial, g, 8);
        let val = frobenius_inner(w, &m);
        if val < best.1 - S::lit(1e-12) {
            if lmi_slack(&m, g) >= feas_tol {
                best = (m.clone(), val);
                stall = 0;
            }
        } else {
            stall += 1;
            if stall > 60 {
                break;
            }
        }
    }
    (best.0, best.1)
}

/// Upper bound on `Pr{‖v‖₂ ≥ c}` from the moments alone.
///
/// The scalar multiplier λ is searched by golden section on `(0, c²]` (the
/// range where the two cones genuinely interact; for λ ≥ c² the optimum has
/// the closed form evaluated separately), each inner problem solved by
/// projected gradient with alternating projections. The Chebyshev point is
/// always evaluated and the best verified certificate wins, so the reported
/// value never exceeds `Tr(Σ)/c²`.
pub fn markov_bound<S: Scalar>(moments: &MomentInfo<S>, c: S) -> Result<BoundCertificate<S>> {
    if c <= S::zero() || !c.is_finite() {
        return Err(Error::InvalidInput("radius c must be positive".into()));
    }
    let n = moments.dimension();
    let w = moments.witness_matrix();
    let slack = S::lit(1e-8);

    let mut best = chebyshev_certificate(moments, c);
    debug_assert!(best.verify(moments, c, slack));

    // closed-form branch λ ≥ c²: value 1 + (TrΣ - c²)/λ
    let trace = moments.trace();
    if trace > c * c {
        // decreasing in λ, approach 1 from above; evaluate a large multiplier
        let cand = large_lambda_certificate(moments, c, c * c * S::lit(1e6));
        if cand.value < best.value && cand.verify(moments, c, slack) {
            best = cand;
        }
    }

    // golden-section on λ in (0, c²]
    let lam_hi = c * c;
    let lam_lo = c * c * S::lit(1e-3);
    let evaluate = |lambda: S| -> (Array2<S>, S) {
        let g = shift_matrix(n, c, lambda);
        // feasible start: G with its negative corner clamped
        let mut start = g.clone();
        start[[n, n]] = start[[n, n]].max(S::zero());
        inner_minimize(&w, &g, &start, 600)
    };
    let phi = S::lit(0.618_033_988_749_894_8);
    let mut a = lam_lo;
    let mut b = lam_hi;
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = evaluate(x1);
    let mut f2 = evaluate(x2);
    for _ in 0..24 {
        if f1.1 <= f2.1 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = evaluate(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = evaluate(x2);
        }
    }
    for (lambda, (m, val)) in [(x1, f1), (x2, f2)] {
        if val < best.value {
            let cand = certificate_from_m(&m, lambda, &w);
            if cand.verify(moments, c, slack) {
                best = cand;
            }
        }
    }
    Ok(best)
}

/// Evaluate the bound along an increasing grid of radii. A certificate for a
/// smaller radius stays feasible for every larger one, so the best
/// certificate found so far is carried forward; the reported values are
/// nonincreasing by construction while remaining genuine feasible points.
pub fn bound_grid<S: Scalar>(
    moments: &MomentInfo<S>,
    radii: &[S],
) -> Result<Vec<BoundCertificate<S>>> {
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "radius grid must be strictly increasing".into(),
        ));
    }
    let slack = S::lit(1e-8);
    let mut out: Vec<BoundCertificate<S>> = Vec::with_capacity(radii.len());
    for &c in radii {
        let mut cert = markov_bound(moments, c)?;
        if let Some(prev) = out.last() {
            if prev.value < cert.value && prev.verify(moments, c, slack) {
                cert = prev.clone();
            }
        }
        out.push(cert);
    }
    Ok(out)
}

/// Smallest radius whose moment bound drops to the confidence level `eta`,
/// found by doubling then bisection (the exact bound is nonincreasing in the
/// radius). The returned radius satisfies `markov_bound(m, c).probability()
/// ≤ eta` and is tight to `1e-4` relative.
pub fn radius_for_confidence<S: Scalar>(moments: &MomentInfo<S>, eta: S) -> Result<S> {
    if eta <= S::zero() || eta >= S::one() {
        // the chance-constraint reading needs 0 < eta < 1; eta = 1 is allowed
        // as the degenerate "always" level
        if eta == S::one() {
            return Ok(S::lit(1e-6));
        }
        return Err(Error::InvalidInput("eta must lie in (0, 1]".into()));
    }
    let lo0 = S::lit(1e-6);
    if markov_bound(moments, lo0)?.probability() <= eta {
        return Ok(lo0);
    }
    let mut hi = lo0;
    let mut doublings = 0;
    loop {
        hi *= S::lit(2.0);
        doublings += 1;
        // Chebyshev alone certifies once Tr(Σ)/c² ≤ eta
        if moments.trace() / (hi * hi) <= eta || markov_bound(moments, hi)?.probability() <= eta {
            break;
        }
        if doublings >= 60 {
            return Err(Error::ConfidenceUnreachable);
        }
    }
    let mut lo = hi * S::lit(0.5);
    while hi - lo > S::lit(1e-4) * hi {
        let mid = (lo + hi) * S::lit(0.5);
        if markov_bound(moments, mid)?.probability() <= eta {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Empirical exceedance frequency `#{‖vᵢ‖₂ ≥ c}/N`; the sampling lower-bound
/// witness for the moment bound.
pub fn sampled_exceedance<S: Scalar>(
    mut sampler: impl FnMut(&mut ChaCha8Rng) -> Array1<S>,
    c: S,
    draws: usize,
    seed: u64,
) -> Result<S> {
    if draws == 0 {
        return Err(Error::InvalidInput(
            "sampled_exceedance needs draws >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..draws {
        let v = sampler(&mut rng);
        let norm = v.iter().fold(S::zero(), |a, &x| a + x * x).sqrt();
        if norm >= c {
            hits += 1;
        }
    }
    Ok(S::from(hits).unwrap() / S::from(draws).unwrap())
}
