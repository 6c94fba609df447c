use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown geometry kind `{0}`")]
    UnknownKind(String),
    #[error("`{0}` has corners or edges; only smooth boundaries are supported since the estimates assume one")]
    NonSmooth(String),
    #[error("invalid parameters for {kind}: {reason}")]
    InvalidParameters { kind: String, reason: String },
    #[error("point {0:?} lies outside the geometry")]
    OutsideGeometry(Vec<f64>),
    #[error("geometry has no boundary")]
    NoBoundary,
    #[error("operation needs a closed manifold but the geometry has a boundary")]
    NotClosed,
    #[error("operation needs a mesh or grid discretization")]
    NoDiscretization,
    #[error("degenerate cell {0} (zero volume)")]
    DegenerateCell(usize),
    #[error("mesh check failed: {0}")]
    BadMesh(String),
    #[error("linear solve failed: {0}")]
    Solver(String),
    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("invalid exponent: {0}")]
    Exponent(String),
    #[error("diagonal singularity: x = y")]
    Diagonal,
    #[error("no analytic Green function for {0}")]
    NoOracle(String),
    #[error("unknown theorem id `{id}`; valid ids: {valid}")]
    UnknownTheorem { id: String, valid: String },
    #[error("inadmissible exponents for {theorem}: {reason}")]
    Inadmissible { theorem: String, reason: String },
    #[error("family `{family}` cannot be used here: {reason}")]
    IncompatibleFamily { family: String, reason: String },
    #[error("empty {0}")]
    Empty(&'static str),
    #[error("missing {0}")]
    Missing(String),
    #[error("evaluation at a point mass location, where the function is -inf")]
    AtPointMass,
    #[error("length mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("config error at `{path}`: {reason}")]
    Config { path: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
