use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("basis index {0} out of range (expected 1, 2 or 3)")]
    BasisIndex(usize),

    #[error("matrix is not traceless (|tr| = {0:e})")]
    NotTraceless(f64),

    #[error("matrix is not a real unimodular matrix: {0}")]
    NotRealUnimodular(String),

    #[error("matrix lies outside SU_<=(1,1) (defect {0:e})")]
    OutsideSemigroup(f64),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("anomaly: E(exp(2i eta)) = 1 within tolerance, D is undefined")]
    Anomaly,

    #[error("lambda undefined: {0}")]
    LambdaUndefined(String),

    #[error("orbit escaped the closed disc at step {step} (|z|^2 = {radius_sq:e})")]
    Escape { step: u64, radius_sq: f64 },

    #[error("degenerate projective vector (norm {0:e})")]
    DegenerateVector(f64),

    #[error("accumulator holds no samples")]
    EmptyAccumulator,

    #[error("observable mismatch: {0}")]
    ObservableMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("model file: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by the numerics of a run rather than by its
    /// configuration.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Escape { .. } | Error::DegenerateVector(_))
    }
}
