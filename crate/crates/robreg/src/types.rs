//! Problem instances, disturbance models, and feature-wise perturbations.

use ndarray::{Array1, Array2, ArrayView1};

use crate::coupled::ConvexConstraintOracle;
use crate::lp::{lp_solve, LpStatus};
use crate::norms::NormTag;
use crate::{Error, Result, Scalar};

/// A regression instance: observation matrix `A` (rows are samples, columns
/// are features) and target vector `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance<S> {
    a: Array2<S>,
    b: Array1<S>,
}

impl<S: Scalar> ProblemInstance<S> {
    pub fn new(a: Array2<S>, b: Array1<S>) -> Result<Self> {
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(Error::InvalidInput("empty observation matrix".into()));
        }
        if a.nrows() != b.len() {
            return Err(Error::DimensionMismatch(format!(
                "A has {} rows but b has {} entries",
                a.nrows(),
                b.len()
            )));
        }
        if a.iter().any(|v| !v.is_finite()) || b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite entry in instance".into()));
        }
        Ok(ProblemInstance { a, b })
    }

    /// Number of samples (rows of `A`).
    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    /// Number of features (columns of `A`).
    pub fn m(&self) -> usize {
        self.a.ncols()
    }

    pub fn matrix(&self) -> &Array2<S> {
        &self.a
    }

    pub fn targets(&self) -> &Array1<S> {
        &self.b
    }

    /// Sample row `rᵢᵀ`.
    pub fn row(&self, i: usize) -> ArrayView1<'_, S> {
        self.a.row(i)
    }

    /// Feature column `aⱼ`.
    pub fn column(&self, j: usize) -> ArrayView1<'_, S> {
        self.a.column(j)
    }

    /// Residual `b - A x`.
    pub fn residual(&self, x: &Array1<S>) -> Result<Array1<S>> {
        if x.len() != self.m() {
            return Err(Error::DimensionMismatch(format!(
                "x has {} entries for {} features",
                x.len(),
                self.m()
            )));
        }
        Ok(&self.b - &self.a.dot(x))
    }
}

/// Admissible disturbance sets for the observation matrix, acting column by
/// column.
#[derive(Clone)]
pub enum UncertaintyModel<S> {
    /// Independent per-feature budgets `‖δᵢ‖ ≤ cᵢ`.
    Uncoupled { radii: Array1<S> },
    /// Column norms jointly bounded: `‖(‖δ₁‖_loss, …, ‖δ_m‖_loss)‖_agg ≤ radius`.
    NormCoupled {
        loss: NormTag<S>,
        aggregator: NormTag<S>,
        radius: S,
    },
    /// Column budgets ranging over the polytope `{c ≥ 0 : T c ≤ s}`.
    Polytope { t: Array2<S>, s: Array1<S> },
    /// Column budgets ranging over `{c ≥ 0 : f_j(c) ≤ 0 ∀j}` for user-supplied
    /// convex constraints.
    GeneralConvex(ConvexConstraintOracle<S>),
}

impl<S: Scalar> UncertaintyModel<S> {
    pub fn uncoupled(radii: Array1<S>) -> Result<Self> {
        if radii.iter().any(|c| *c < S::zero() || !c.is_finite()) {
            return Err(Error::InvalidInput(
                "uncoupled radii must be nonnegative".into(),
            ));
        }
        Ok(UncertaintyModel::Uncoupled { radii })
    }

    pub fn norm_coupled(loss: NormTag<S>, aggregator: NormTag<S>, radius: S) -> Result<Self> {
        if radius < S::zero() || !radius.is_finite() {
            return Err(Error::InvalidInput(
                "coupling radius must be nonnegative".into(),
            ));
        }
        // fail early if the aggregator has no dual
        aggregator.dual()?;
        Ok(UncertaintyModel::NormCoupled {
            loss,
            aggregator,
            radius,
        })
    }

    /// Polytope budgets; emptiness of `{c ≥ 0 : T c ≤ s}` is rejected here by
    /// a phase-1 feasibility solve.
    pub fn polytope(t: Array2<S>, s: Array1<S>) -> Result<Self> {
        if t.nrows() != s.len() {
            return Err(Error::DimensionMismatch(format!(
                "T has {} rows but s has {} entries",
                t.nrows(),
                s.len()
            )));
        }
        // Tc <= s  <=>  (-T)c >= -s
        let cost = Array1::zeros(t.ncols());
        let outcome = lp_solve(&cost, &t.mapv(|v| -v), &s.mapv(|v| -v))?;
        if outcome.status() == LpStatus::Infeasible {
            return Err(Error::EmptyUncertaintySet(
                "{c >= 0 : Tc <= s} is empty".into(),
            ));
        }
        Ok(UncertaintyModel::Polytope { t, s })
    }

    pub fn general_convex(oracle: ConvexConstraintOracle<S>) -> Self {
        UncertaintyModel::GeneralConvex(oracle)
    }

    /// Per-feature radii when the model is uncoupled.
    pub fn uncoupled_radii(&self) -> Option<&Array1<S>> {
        match self {
            UncertaintyModel::Uncoupled { radii } => Some(radii),
            _ => None,
        }
    }
}

impl<S: std::fmt::Debug> std::fmt::Debug for UncertaintyModel<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UncertaintyModel::Uncoupled { radii } => {
                f.debug_struct("Uncoupled").field("radii", radii).finish()
            }
            UncertaintyModel::NormCoupled {
                loss,
                aggregator,
                radius,
            } => f
                .debug_struct("NormCoupled")
                .field("loss", loss)
                .field("aggregator", aggregator)
                .field("radius", radius)
                .finish(),
            UncertaintyModel::Polytope { t, s } => f
                .debug_struct("Polytope")
                .field("t", t)
                .field("s", s)
                .finish(),
            UncertaintyModel::GeneralConvex(o) => f
                .debug_struct("GeneralConvex")
                .field("constraints", &o.len())
                .finish(),
        }
    }
}

/// A disturbance matrix `ΔA`, stored column-wise: column `i` perturbs
/// feature `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation<S> {
    columns: Array2<S>,
}

impl<S: Scalar> Perturbation<S> {
    pub fn new(columns: Array2<S>) -> Self {
        Perturbation { columns }
    }

    pub fn matrix(&self) -> &Array2<S> {
        &self.columns
    }

    pub fn column(&self, i: usize) -> ArrayView1<'_, S> {
        self.columns.column(i)
    }

    /// Membership in an uncoupled model: every column norm within its budget,
    /// measured in `column_norm` with slack `tol`.
    pub fn is_member(
        &self,
        model: &UncertaintyModel<S>,
        column_norm: &NormTag<S>,
        tol: S,
    ) -> Result<bool> {
        let UncertaintyModel::Uncoupled { radii } = model else {
            return Err(Error::UnsupportedModel(
                "membership test implemented for uncoupled models".into(),
            ));
        };
        if radii.len() != self.columns.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "{} radii for {} columns",
                radii.len(),
                self.columns.ncols()
            )));
        }
        Ok((0..self.columns.ncols())
            .all(|i| column_norm.eval(&self.columns.column(i).to_owned()) <= radii[i] + tol))
    }
}
