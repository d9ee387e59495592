/// Errors shared by every module of the toolkit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dual undefined for zero weight")]
    ZeroWeightDual,
    #[error("uncertainty set is empty: {0}")]
    EmptyUncertaintySet(String),
    #[error("not a valid convex-constraint oracle: {0}")]
    InvalidOracle(String),
    #[error("unsupported uncertainty model: {0}")]
    UnsupportedModel(String),
    #[error("confidence unreachable from moments")]
    ConfidenceUnreachable,
    #[error("uncertainty set appears unbounded")]
    UnboundedUncertainty,
    #[error("disturbance budget cannot cover requested weights")]
    BudgetInfeasible,
    #[error("construction assumptions violated: {0}")]
    ConstructionViolated(String),
    #[error("invalid moments: {0}")]
    InvalidMoments(String),
}

pub type Result<T> = std::result::Result<T, Error>;
