use thiserror::Error;

/// Errors raised by the library. The CLI maps every variant to exit code 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid form data: {0}")]
    InvalidForm(String),

    #[error("insufficient Hecke data: no eigenvalue for p = {0}")]
    InsufficientHecke(u64),

    #[error("{what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: achieved error estimate {estimate:e} against target {target:e}")]
    Quadrature { estimate: f64, target: f64 },

    #[error("form has no norm_sq")]
    MissingNorm,

    #[error("tolerance {tol:e} not reached within shell budget {budget}; achieved tail bound {tail:e}")]
    Budget { tol: f64, budget: u64, tail: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error("parse: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
