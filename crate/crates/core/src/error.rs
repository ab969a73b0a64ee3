use thiserror::Error;

/// Errors raised by the c3s library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid charges: {0}")]
    InvalidCharges(String),
    #[error("invalid mass: {0}")]
    InvalidMass(String),
    #[error("evaluation point coincides with a Coulomb singularity")]
    Singular,
    #[error("quadrature did not reach tolerance {requested:e} (estimated error {achieved:e}) within {subdivisions} subdivisions")]
    QuadratureFailure { requested: f64, achieved: f64, subdivisions: usize },
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("sup of y^2 V(y) unavailable for this potential")]
    SupUnavailable,
    #[error("invalid bracket: {0}")]
    BracketInvalid(String),
    #[error("no negative eigenvalue on the given grid")]
    NoNegativeEigenvalue,
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("unknown particle `{0}`")]
    UnknownParticle(String),
    #[error("unknown system `{0}`")]
    UnknownSystem(String),
    #[error("particle table line {line}: {msg}")]
    TableParse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for failures of a numerical routine, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular
                | Error::QuadratureFailure { .. }
                | Error::SupUnavailable
                | Error::NoNegativeEigenvalue
                | Error::GridTooCoarse(_)
        )
    }
}
