use thiserror::Error;

/// Errors produced by the solvers, samplers and density constructors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate configuration: eigenvalues {i} and {j} coincide")]
    DegenerateConfiguration { i: usize, j: usize },

    #[error("trace constraint violated: |sum| = {sum:e} exceeds {tolerance:e}")]
    TraceConstraint { sum: f64, tolerance: f64 },

    #[error("coupling g = {g} is outside the {branch} branch")]
    OutOfBranch { branch: &'static str, g: f64 },

    #[error("density is not admissible: {0}")]
    NonAdmissibleDensity(String),

    #[error("z = {re} + {im}i lies within {distance:e} of the support")]
    NearSingularity { re: f64, im: f64, distance: f64 },

    #[error("boundary residuals not satisfied (max |r| = {norm:e})")]
    ResidualViolation { norm: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("Newton iteration did not converge after {iterations} iterations (|r| = {norm:e})")]
    NonConvergence {
        best: Vec<f64>,
        norm: f64,
        iterations: usize,
    },

    #[error("Jacobian is singular (condition estimate {condition:e})")]
    SingularJacobian { condition: f64 },

    #[error("no branch seed at g = {g}: {reason}")]
    SeedFailure { g: f64, reason: String },

    #[error("no sign change of the free-energy difference in [{lo}, {hi}]: {reason}")]
    NoSignChange { lo: f64, hi: f64, reason: String },

    #[error("empty input")]
    EmptyInput,

    #[error("grid with {points} points is coarser than the minimum of {minimum}")]
    Resolution { points: usize, minimum: usize },

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
