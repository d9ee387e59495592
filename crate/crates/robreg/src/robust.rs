//! Worst-case residual over feature-wise uncoupled disturbance sets.
//!
//! For budgets `‖δᵢ‖ ≤ cᵢ` per feature column the inner maximization has a
//! closed form: `max ‖b - (A+ΔA)x‖ = ‖b - Ax‖ + Σ cᵢ|xᵢ|`, with the maximum
//! attained by pushing every column against its budget along the residual
//! direction. The sampler here certifies the closed form from below.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::norms::{NormKind, NormTag};
use crate::{Error, Perturbation, ProblemInstance, Result, Scalar, UncertaintyModel};

fn sgn<S: Scalar>(x: S) -> S {
    if x > S::zero() {
        S::one()
    } else if x < S::zero() {
        -S::one()
    } else {
        S::zero()
    }
}

fn uncoupled_radii<'a, S: Scalar>(
    p: &ProblemInstance<S>,
    u: &'a UncertaintyModel<S>,
) -> Result<&'a Array1<S>> {
    let radii = u.uncoupled_radii().ok_or_else(|| {
        Error::UnsupportedModel("closed-form worst case needs an uncoupled model".into())
    })?;
    if radii.len() != p.m() {
        return Err(Error::DimensionMismatch(format!(
            "{} radii for {} features",
            radii.len(),
            p.m()
        )));
    }
    Ok(radii)
}

/// Exact worst-case residual `max_{ΔA} ‖b - (A+ΔA)x‖_loss` over the uncoupled
/// model with per-column budgets in the same norm as the loss:
/// `‖b - Ax‖_loss + Σᵢ cᵢ|xᵢ|`.
pub fn worst_case_residual<S: Scalar>(
    p: &ProblemInstance<S>,
    x: &Array1<S>,
    u: &UncertaintyModel<S>,
    loss: &NormTag<S>,
) -> Result<S> {
    let radii = uncoupled_radii(p, u)?;
    let res = p.residual(x)?;
    let penalty = radii
        .iter()
        .zip(x.iter())
        .fold(S::zero(), |acc, (&c, &xi)| acc + c * xi.abs());
    Ok(loss.eval(&res) + penalty)
}

/// The disturbance that attains the worst case for the l2 loss:
/// `δᵢ* = -cᵢ · sgn(xᵢ) · u` with `u` the unit residual direction (or `e₁`
/// when the residual vanishes, which keeps the construction deterministic).
pub fn adversarial_perturbation<S: Scalar>(
    p: &ProblemInstance<S>,
    x: &Array1<S>,
    u: &UncertaintyModel<S>,
) -> Result<Perturbation<S>> {
    let radii = uncoupled_radii(p, u)?;
    let res = p.residual(x)?;
    let dir = residual_direction(&res);
    let mut cols = Array2::zeros((p.n(), p.m()));
    for i in 0..p.m() {
        let scale = -radii[i] * sgn(x[i]);
        if scale == S::zero() {
            continue;
        }
        for k in 0..p.n() {
            cols[[k, i]] = scale * dir[k];
        }
    }
    Ok(Perturbation::new(cols))
}

fn residual_direction<S: Scalar>(res: &Array1<S>) -> Array1<S> {
    let norm = NormTag::l2().eval(res);
    if norm == S::zero() {
        let mut e1 = Array1::zeros(res.len());
        e1[0] = S::one();
        e1
    } else {
        res.mapv(|v| v / norm)
    }
}

/// Residual after applying a perturbation: `‖b - (A + ΔA) x‖_loss`.
pub fn perturbed_residual<S: Scalar>(
    p: &ProblemInstance<S>,
    x: &Array1<S>,
    delta: &Perturbation<S>,
    loss: &NormTag<S>,
) -> Result<S> {
    if delta.matrix().dim() != p.matrix().dim() {
        return Err(Error::DimensionMismatch(
            "perturbation shape differs from A".into(),
        ));
    }
    let shifted = p.matrix() + delta.matrix();
    Ok(loss.eval(&(p.targets() - &shifted.dot(x))))
}

/// Best objective over `samples` random members of the uncertainty set. One
/// draw is replaced by the closed-form adversary for the l2 loss; for l1 and
/// l-infinity losses the sign-pattern extreme points of the column ball are
/// injected as additional candidates (maxima of a convex function over a ball
/// sit at extreme points). Always at most the closed form.
pub fn sampled_worst_case<S: Scalar>(
    p: &ProblemInstance<S>,
    x: &Array1<S>,
    u: &UncertaintyModel<S>,
    loss: &NormTag<S>,
    samples: usize,
    seed: u64,
) -> Result<S> {
    if samples == 0 {
        return Err(Error::InvalidInput(
            "sampled_worst_case needs samples >= 1".into(),
        ));
    }
    if loss.is_weighted() {
        return Err(Error::UnsupportedModel(
            "sampler supports unweighted losses".into(),
        ));
    }
    let radii = uncoupled_radii(p, u)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = S::zero();
    let mut consider = |delta: &Perturbation<S>| -> Result<()> {
        let v = perturbed_residual(p, x, delta, loss)?;
        if v > best {
            best = v;
        }
        Ok(())
    };

    let deterministic = if loss.kind() == NormKind::L2 {
        vec![adversarial_perturbation(p, x, u)?]
    } else {
        extreme_candidates(p, x, radii, loss.kind())
    };
    let random_draws = samples.saturating_sub(deterministic.len().min(samples));
    for _ in 0..random_draws {
        let mut cols = Array2::zeros((p.n(), p.m()));
        for i in 0..p.m() {
            let col = sample_in_ball(p.n(), radii[i], loss.kind(), &mut rng);
            for k in 0..p.n() {
                cols[[k, i]] = col[k];
            }
        }
        consider(&Perturbation::new(cols))?;
    }
    for d in &deterministic {
        consider(d)?;
    }
    Ok(best)
}

/// Extreme-point candidates aligned with the residual sign pattern, for
/// column balls of the l1 / l-infinity norms.
fn extreme_candidates<S: Scalar>(
    p: &ProblemInstance<S>,
    x: &Array1<S>,
    radii: &Array1<S>,
    kind: NormKind,
) -> Vec<Perturbation<S>> {
    let res = p.targets() - &p.matrix().dot(x);
    let n = p.n();
    let mut dirs: Vec<Array1<S>> = Vec::new();
    match kind {
        NormKind::L1 => {
            // vertices +-e_k of the l1 ball, k picked by residual magnitude
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| res[b].abs().partial_cmp(&res[a].abs()).unwrap());
            for &k in order.iter().take(3) {
                let mut e = Array1::zeros(n);
                e[k] = if res[k] >= S::zero() {
                    S::one()
                } else {
                    -S::one()
                };
                dirs.push(e);
            }
        }
        NormKind::LInf => {
            // the +-1 sign pattern matching the residual
            dirs.push(res.mapv(|r| if r >= S::zero() { S::one() } else { -S::one() }));
        }
        NormKind::L2 => {}
    }
    dirs.into_iter()
        .map(|dir| {
            let mut cols = Array2::zeros((n, p.m()));
            for i in 0..p.m() {
                let scale = -radii[i] * sgn(x[i]);
                for k in 0..n {
                    cols[[k, i]] = scale * dir[k];
                }
            }
            Perturbation::new(cols)
        })
        .collect()
}

/// Uniform draw from the radius-`r` ball of the given norm in `R^n`.
fn sample_in_ball<S: Scalar>(n: usize, r: S, kind: NormKind, rng: &mut ChaCha8Rng) -> Array1<S> {
    if r == S::zero() {
        return Array1::zeros(n);
    }
    match kind {
        NormKind::L2 => {
            // gaussian direction, radius scaled by U^{1/n}
            let mut v = Array1::from_shape_fn(n, |_| S::lit(gaussian(rng)));
            let norm = NormTag::l2().eval(&v);
            if norm == S::zero() {
                return Array1::zeros(n);
            }
            let radius = r * S::lit(rng.gen::<f64>().powf(1.0 / n as f64));
            v.mapv_inplace(|x| x / norm * radius);
            v
        }
        NormKind::L1 => {
            // exponential spacings give a uniform point on the simplex
            let mut v = Array1::from_shape_fn(n, |_| {
                let e = -rng.gen::<f64>().max(1e-300).ln();
                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                S::lit(sign * e)
            });
            let norm = NormTag::l1().eval(&v);
            let radius = r * S::lit(rng.gen::<f64>().powf(1.0 / n as f64));
            v.mapv_inplace(|x| x / norm * radius);
            v
        }
        NormKind::LInf => Array1::from_shape_fn(n, |_| S::lit(rng.gen_range(-1.0..=1.0)) * r),
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
