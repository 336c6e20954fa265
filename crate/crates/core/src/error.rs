use thiserror::Error;

pub type Result<T> = std::result::Result<T, ForecastError>;

#[derive(Debug, Error)]
pub enum ForecastError {
    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("Box-Cox requires strictly positive input (found {value} at index {index}); apply the shift recorded in the transform state first")]
    NonPositive { index: usize, value: f64 },

    #[error("seasonal index {index} is {value}; the series is not multiplicatively seasonal")]
    NonPositiveSeasonalIndex { index: usize, value: f64 },

    #[error("corpus error: {0}")]
    Corpus(String),

    #[error("factorization failed for kernel {kernel} after jitter escalation")]
    Factorization { kernel: String },

    #[error("empty hyper-parameter grid for learner {0}")]
    EmptyGrid(String),

    #[error("inconsistent coverage: {0}")]
    Coverage(String),

    #[error("model {model} failed: {reason}")]
    Model { model: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl ForecastError {
    /// True for errors caused by the input data rather than by the program.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            ForecastError::Corpus(_)
                | ForecastError::NonFinite(_)
                | ForecastError::InsufficientData { .. }
                | ForecastError::Coverage(_)
                | ForecastError::Csv(_)
                | ForecastError::Io(_)
        )
    }
}
