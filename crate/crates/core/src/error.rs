use thiserror::Error;

/// Errors raised by field evolution, grid generation, and the solver.
///
/// Message strings are part of the CLI contract: they surface verbatim as
/// one-line diagnostics.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty field")]
    EmptyField,
    #[error("non-positive field value")]
    NonPositiveFieldValue,
    #[error("non-positive field sum")]
    NonPositiveFieldSum,
    #[error("field positivity violated, reduce dt")]
    PositivityViolated,
    #[error("viscosity must be positive")]
    NonPositiveViscosity,
    #[error("first-order expansion invalid, use exact form")]
    FirstOrderExpansionInvalid,
    #[error("linearization window exceeded")]
    LinearizationWindowExceeded,
    #[error("step law out of range")]
    StepLawOutOfRange,
    #[error("log argument not greater than 1, refinement impossible")]
    RefinementImpossible,
    #[error("xi must lie on the coarse lattice")]
    XiOffLattice,
    #[error("no interior nodes")]
    NoInteriorNodes,
    #[error("singular tridiagonal system")]
    SingularSystem,
    #[error("nodes not strictly increasing")]
    NodesNotIncreasing,
    #[error("start below the Péclet limit for a clean study")]
    PecletLimitExceeded,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
