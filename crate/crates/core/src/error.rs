use thiserror::Error;

#[derive(Debug, Error)]
pub enum HdxError {
    #[error("argument out of range: {0}")]
    Range(String),
    #[error("not a face of the complex: {0:?}")]
    NotAFace(Vec<usize>),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("complex is not partite: {0}")]
    NotPartite(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("unsupported field size q = {0}")]
    UnsupportedField(u32),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("map is not a homomorphism at ({0}, {1})")]
    NotHomomorphism(usize, usize),
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: i8, found: i8 },
    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("not a coboundary; inconsistent cycle {cycle:?}")]
    NotCoboundary { cycle: Vec<usize> },
    #[error("invalid cone: {0}")]
    InvalidCone(String),
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("invalid blow-up: {0}")]
    InvalidBlowUp(String),
    #[error("solver failed in stage {stage}: {reason}")]
    Solver { stage: String, reason: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HdxError>;
