//! Robustness-based sparsity certificates.
//!
//! A feature gets zero weight whenever an admissible perturbation can make it
//! irrelevant. For the l2 loss with uniform radius `c` that turns geometric:
//! a feature whose projection onto `span({aᵢ : i ∈ I} ∪ {b})` has norm at
//! most `c` can be perturbed into the orthogonal complement, so every optimum
//! vanishes outside `I`.

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::linalg::orthonormal_basis;
use crate::norms::NormTag;
use crate::robust::worst_case_residual;
use crate::solvers::{solve_weighted_l1, RegressionSolution, SolverOptions};
use crate::{Error, Perturbation, ProblemInstance, Result, Scalar, UncertaintyModel};

/// Projection norms of the out-of-support features and the verdict of the
/// incoherence test `‖aⱼ^=‖₂ ≤ c` for all `j ∉ I`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupportCertificate<S> {
    pub support: Vec<usize>,
    /// `(feature index, ‖aⱼ^=‖₂)` for every feature outside the support.
    pub projection_norms: Vec<(usize, S)>,
    pub radius: S,
    pub verdict: bool,
}

/// Compute the incoherence certificate for index set `I` and radius `c`.
///
/// The span of `{aᵢ : i ∈ I} ∪ {b}` is orthonormalized with rank tolerance
/// `1e-10`; `‖aⱼ^=‖₂` is the norm of the basis-coefficient vector of `aⱼ`,
/// which equals `max {vᵀaⱼ : v ∈ span, ‖v‖₂ = 1}`.
pub fn incoherence_certificate<S: Scalar>(
    p: &ProblemInstance<S>,
    support: &[usize],
    c: S,
) -> Result<SupportCertificate<S>> {
    if support.iter().any(|&i| i >= p.m()) {
        return Err(Error::InvalidInput("support index out of range".into()));
    }
    if c < S::zero() || !c.is_finite() {
        return Err(Error::InvalidInput("radius must be nonnegative".into()));
    }
    let mut spanning: Vec<Array1<S>> = support.iter().map(|&i| p.column(i).to_owned()).collect();
    spanning.push(p.targets().clone());
    let basis = orthonormal_basis(&spanning, S::lit(1e-10));

    let mut projection_norms = Vec::new();
    let mut verdict = true;
    for j in 0..p.m() {
        if support.contains(&j) {
            continue;
        }
        let col = p.column(j).to_owned();
        let norm_sq = basis.iter().fold(S::zero(), |acc, q| {
            let coef = q.dot(&col);
            acc + coef * coef
        });
        let norm = norm_sq.sqrt();
        if norm > c + S::lit(1e-9) {
            verdict = false;
        }
        projection_norms.push((j, norm));
    }
    Ok(SupportCertificate {
        support: support.to_vec(),
        projection_norms,
        radius: c,
        verdict,
    })
}

/// Outcome of the zero-support verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroSupportStatus {
    Holds,
    Violated,
    /// The solver did not converge, so nothing is claimed either way.
    Indeterminate,
}

/// Solve the uniform-radius-`c` problem under the l2 loss and check that
/// every fitted weight outside the certified support vanishes. The
/// incoherence certificate must hold before the solve is attempted.
pub fn verify_zero_support<S: Scalar>(
    p: &ProblemInstance<S>,
    support: &[usize],
    c: S,
    opts: &SolverOptions<S>,
) -> Result<ZeroSupportStatus> {
    let cert = incoherence_certificate(p, support, c)?;
    if !cert.verdict {
        return Err(Error::InvalidInput(
            "incoherence certificate does not hold; nothing to verify".into(),
        ));
    }
    let radii = Array1::from_elem(p.m(), c);
    let sol = solve_weighted_l1(p, &radii, &NormTag::l2(), opts)?;
    if !sol.converged {
        return Ok(ZeroSupportStatus::Indeterminate);
    }
    let x = sol.weights();
    let scale = S::lit(1e-6) * (S::one() + NormTag::linf().eval(&x));
    let holds = (0..p.m())
        .filter(|j| !support.contains(j))
        .all(|j| x[j].abs() <= scale);
    Ok(if holds {
        ZeroSupportStatus::Holds
    } else {
        ZeroSupportStatus::Violated
    })
}

/// Report of the support-persistence experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PersistenceReport<S> {
    pub original: RegressionSolution<S>,
    pub perturbed: RegressionSolution<S>,
    pub original_support: Vec<usize>,
    pub perturbed_support: Vec<usize>,
    /// Radii used for the perturbed problem: `cⱼ + lⱼ` outside the support.
    pub inflated_radii: Vec<S>,
    /// `|worst_case(A, c, x*ᴵ) - worst_case(Ã, c+l, x*ᴵ)|` for the original
    /// optimum restricted to its support; zero up to roundoff whenever the
    /// supported optimum exists (the perturbed columns multiply zeros).
    pub identity_gap: S,
}

fn support_of<S: Scalar>(x: &Array1<S>) -> Vec<usize> {
    let scale = S::lit(1e-6) * (S::one() + NormTag::linf().eval(x));
    (0..x.len()).filter(|&j| x[j].abs() > scale).collect()
}

/// Perturb the features outside `I` by `perturbation`, inflate their radii by
/// the recorded column norms, and compare the two robust problems.
pub fn support_persistence_experiment<S: Scalar>(
    p: &ProblemInstance<S>,
    support: &[usize],
    perturbation: &Perturbation<S>,
    radii: &Array1<S>,
    opts: &SolverOptions<S>,
) -> Result<PersistenceReport<S>> {
    if radii.len() != p.m() {
        return Err(Error::DimensionMismatch("radii length vs features".into()));
    }
    if perturbation.matrix().dim() != p.matrix().dim() {
        return Err(Error::DimensionMismatch("perturbation shape vs A".into()));
    }
    for &i in support {
        if i >= p.m() {
            return Err(Error::InvalidInput("support index out of range".into()));
        }
        let touched = perturbation.column(i).iter().any(|v| *v != S::zero());
        if touched {
            return Err(Error::InvalidInput(format!(
                "perturbation touches supported feature {i}"
            )));
        }
    }

    let inflated = Array1::from_shape_fn(p.m(), |j| {
        if support.contains(&j) {
            radii[j]
        } else {
            radii[j] + NormTag::l2().eval(&perturbation.column(j).to_owned())
        }
    });
    let perturbed_matrix = p.matrix() + perturbation.matrix();
    let perturbed_p = ProblemInstance::new(perturbed_matrix, p.targets().clone())?;

    let original = solve_weighted_l1(p, radii, &NormTag::l2(), opts)?;
    let perturbed = solve_weighted_l1(&perturbed_p, &inflated, &NormTag::l2(), opts)?;

    // the first display of the persistence proof: with the optimum restricted
    // to its certified support, the perturbed columns multiply zeros, so both
    // worst cases agree exactly
    let x = original.weights();
    let x_supported = Array1::from_shape_fn(p.m(), |j| {
        if support.contains(&j) {
            x[j]
        } else {
            S::zero()
        }
    });
    let u_orig = UncertaintyModel::uncoupled(radii.clone())?;
    let u_infl = UncertaintyModel::uncoupled(inflated.clone())?;
    let w_orig = worst_case_residual(p, &x_supported, &u_orig, &NormTag::l2())?;
    let w_pert = worst_case_residual(&perturbed_p, &x_supported, &u_infl, &NormTag::l2())?;

    Ok(PersistenceReport {
        original_support: support_of(&x),
        perturbed_support: support_of(&perturbed.weights()),
        original,
        perturbed,
        inflated_radii: inflated.to_vec(),
        identity_gap: (w_orig - w_pert).abs(),
    })
}
