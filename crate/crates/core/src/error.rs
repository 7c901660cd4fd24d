use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid signature p={p}, q={q}: both must be at least 2")]
    InvalidSignature { p: usize, q: usize },

    #[error("signature mismatch: expected ({0}, {1}), found ({2}, {3})")]
    SignatureMismatch(usize, usize, usize, usize),

    #[error("tensor has {0} slots, the maximum is {max}", max = crate::tensor::MAX_SLOTS)]
    TooManySlots(usize),

    #[error("expected {expected} components, found {found}")]
    ComponentCount { expected: usize, found: usize },

    #[error("non-finite component at flat index {0}")]
    NonFinite(usize),

    #[error("slot {slot} out of range for a rank-{rank} tensor")]
    SlotOutOfRange { slot: usize, rank: usize },

    #[error("malformed pair specification: {0}")]
    MalformedPair(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("variance mismatch: {0}")]
    VarianceMismatch(String),

    #[error("slot specification mismatch: {0}")]
    SpecMismatch(String),

    #[error("constraint violated: {what} residual {residual:.3e} exceeds {tolerance:.3e}")]
    ConstraintViolation {
        what: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("invalid scale factor {0}")]
    InvalidScale(f64),

    #[error("matrix is not unimodular: det = {0}")]
    NotUnimodular(f64),

    #[error("singular frame at node {0:?}")]
    SingularFrame(Vec<usize>),

    #[error("ill-conditioned frame at node {node:?}: condition number {cond:.3e}")]
    IllConditioned { node: Vec<usize>, cond: f64 },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("distributions not in general position at {0:?}")]
    NotGeneralPosition(Vec<f64>),

    #[error("matrix is not rank one to tolerance (relative second singular value {0:.3e})")]
    NotRankOne(f64),

    #[error("system too large: {0}")]
    SystemTooLarge(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn is_constraint_violation(&self) -> bool {
        matches!(self, Error::ConstraintViolation { .. })
    }
}
