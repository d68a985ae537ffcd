use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} cap exceeded: requested {requested}, limit {limit}")]
    CapExceeded {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    /// Measurement outcome whose probability fell below the configured cutoff.
    #[error("outcome probability {probability:e} is below the cutoff; conditional state undefined")]
    DegenerateOutcome { probability: f64 },

    #[error("every measurement outcome fell below the probability cutoff")]
    DegenerateSample,

    #[error("time step too coarse: step-halving changed the average from {coarse} to {fine}")]
    StepTooCoarse { coarse: f64, fine: f64 },

    #[error("outcome probability saturated at {p} (Fisher information of the projection is singular)")]
    Saturated { p: f64 },

    #[error("linear algebra failure: {0}")]
    Linalg(#[from] ndarray_linalg::error::LinalgError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialize(String),
}

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded { .. } => 3,
            _ => 2,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub(crate) fn ensure_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
