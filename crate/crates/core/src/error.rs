use thiserror::Error;

/// Errors raised by the matrix, model, dynamics and pipeline layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("position {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("parameter {name} = {value} outside [0, 1]")]
    ParameterOutOfRange { name: &'static str, value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid theta vector: {0}")]
    InvalidTheta(String),

    #[error("dangling point reference: {0}")]
    DanglingReference(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("no witness exists: position {k} is a block start of {point}")]
    NoWitness { point: String, k: usize },

    #[error("restriction not closed: {0}")]
    ClosureViolation(String),

    #[error("infeasible indicator constraints: {0}")]
    Infeasible(String),

    #[error("substitution error: {0}")]
    Substitution(String),

    #[error("word {0:?} does not occur in the scanned language")]
    WordNotFound(String),

    #[error("return words not stabilized at scan length {scan_length}; increase the scan length")]
    NotStabilized { scan_length: usize },

    #[error("horizon too small: {0}")]
    Horizon(String),

    #[error("generator does not vanish on the base cylinder: window {window:?}")]
    GeneratorNotVanishing { window: String },

    #[error("element is invertible (min singular value {min_singular_value:e})")]
    AlreadyInvertible { min_singular_value: f64 },

    #[error("not epsilon-close to singular: smallest singular value {min_singular_value:e} >= budget {budget:e}")]
    NotCloseToSingular { min_singular_value: f64, budget: f64 },

    #[error("simplicity condition fails along the chain from model {from}")]
    SimplicityFails { from: usize },

    #[error("chain too short: need a model with smallest dimension >= {required_n1}")]
    ChainTooShort { required_n1: usize },

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
