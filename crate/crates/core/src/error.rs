use thiserror::Error;

/// Errors from domain construction, the 1D and 2D eigensolvers and the
/// scaling harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown domain family `{0}`")]
    UnknownFamily(String),

    #[error("invalid parameter `{name}` for family `{family}`: {reason}")]
    InvalidParam { family: String, name: String, reason: String },

    #[error("domain invariant `{invariant}` violated at x = {at}")]
    InvalidDomain { invariant: &'static str, at: f64 },

    #[error("weight is not positive at x = {0}")]
    NonPositiveWeight(f64),

    #[error("weight is singular at the endpoint but not monotone on any initial interval")]
    SingularNotMonotone,

    #[error("fixed-point iteration failed to contract after {0} sweeps")]
    PicardNoContraction(usize),

    #[error("integration produced a non-finite state at x = {0}")]
    NonFiniteState(f64),

    #[error("step size {0} out of range")]
    InvalidStep(f64),

    #[error("no eigenvalue bracket found below mu = {0}")]
    NoBracket(f64),

    #[error("glued shot mismatch {0:.3e} exceeds tolerance")]
    GlueMismatch(f64),

    #[error("tolerance {0} out of range")]
    InvalidTolerance(f64),

    #[error("mesh resolution {0} too coarse")]
    MeshTooCoarse(usize),

    #[error("inverted element {element} (area {area:.3e})")]
    InvertedElement { element: usize, area: f64 },

    #[error("eigensolver did not converge within {0} iterations")]
    EigenNoConvergence(usize),

    #[error("mass matrix is not positive definite")]
    DegenerateMass,

    #[error("denominator vanished in {0}")]
    ZeroDenominator(&'static str),

    #[error("no sign change found in the solution")]
    NoSignChange,

    #[error("all points at or below the numerical floor; no slope fit")]
    AllAtFloor,

    #[error("only {got} of {want} rows succeeded; no slopes fitted")]
    TooFewRows { got: usize, want: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
