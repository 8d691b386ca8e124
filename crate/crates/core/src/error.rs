use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ambient dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("grade mismatch: {0} vs {1}")]
    GradeMismatch(usize, usize),

    #[error("variance mismatch: expected {expected}")]
    VarianceMismatch { expected: &'static str },

    #[error("zero input: {0}")]
    ZeroInput(&'static str),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("principal part vanishes")]
    PrincipalPartVanishes,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("lattice too large: (2*{height}+1)^{dim} exceeds {limit}")]
    LatticeTooLarge { height: u32, dim: usize, limit: u64 },

    #[error("zero mass in ball")]
    ZeroMass,

    #[error("domain: {0}")]
    Domain(String),

    #[error("grid too coarse for requested scales")]
    TooCoarse,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("parse error in `{field}`: {msg}")]
    Parse { field: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(field: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::Parse {
        field: field.into(),
        msg: msg.into(),
    }
}
