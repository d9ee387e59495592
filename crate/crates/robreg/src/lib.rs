//! Robust regression toolkit.
//!
//! Linear regression under feature-wise disturbance: the worst-case residual
//! over an uncertainty set of column perturbations collapses to a norm loss
//! plus a weighted l1 penalty, which makes Lasso-type estimators exact robust
//! estimators. The crate provides
//!
//! * closed-form worst-case evaluation and the adversarial perturbation that
//!   attains it ([`robust`]),
//! * first-order saddle-point solvers for the resulting nonsmooth objectives
//!   ([`solvers`]),
//! * coupled uncertainty sets (norm-of-norms, polytope, general convex) and
//!   their reformulated solvers ([`coupled`]), with a dense two-phase simplex
//!   underneath ([`lp`]),
//! * moment-based probability bounds and radius construction ([`chance`]),
//! * the worst-case-expected-loss identity, a box-kernel density estimator
//!   and a consistency experiment harness ([`distribution`]),
//! * incoherence certificates for sparsity ([`sparsity`]) and the
//!   duplicate-feature stability gap ([`stability`]).
//!
//! All numerics are generic over the scalar type through [`Scalar`]; the
//! `*64` aliases at the crate root pin `f64` for everyday use.

pub mod chance;
pub mod coupled;
pub mod distribution;
mod error;
pub mod linalg;
pub mod lp;
pub mod norms;
pub mod robust;
mod scalar;
pub mod solvers;
pub mod sparsity;
pub mod stability;
mod types;

pub use error::{Error, Result};
pub use norms::{dual_norm, norm_eval, NormKind, NormTag};
pub use scalar::Scalar;
pub use types::{Perturbation, ProblemInstance, UncertaintyModel};

/// `f64` problem instance.
pub type Problem64 = ProblemInstance<f64>;
/// `f64` norm tag.
pub type NormTag64 = NormTag<f64>;
/// `f64` uncertainty model.
pub type Uncertainty64 = UncertaintyModel<f64>;
/// `f64` solver output.
pub type Solution64 = solvers::RegressionSolution<f64>;
/// `f64` solver options.
pub type Options64 = solvers::SolverOptions<f64>;
/// `f64` moment description.
pub type Moments64 = chance::MomentInfo<f64>;
