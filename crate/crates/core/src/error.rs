use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("exponent must lie in [1, inf], got {0}")]
    InvalidExponent(String),

    #[error("matrix is singular (not in GL_n)")]
    SingularMatrix,

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("no exact formula: exponents {p} and {q} lie on opposite sides of 2")]
    SidesStraddleTwo { p: String, q: String },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("chain bound needs at least one anchor")]
    EmptyAnchors,

    #[error("every restart ended above the feasibility threshold {threshold} (best {best})")]
    InfeasibleSearch { best: f64, threshold: f64 },

    #[error(
        "enclosure width {width:e} exceeds tolerance at {bits} bits; raise the working precision"
    )]
    PrecisionExhausted { width: f64, bits: u32 },

    #[error("invalid optimizer config: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
