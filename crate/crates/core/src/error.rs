use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("truncation at degree {delta} leaves tail mass {tail:e} (limit 1e-10); try delta >= {suggested}")]
    TruncationTail {
        delta: usize,
        tail: f64,
        suggested: usize,
    },

    #[error("series is not a probability mass function: {0}")]
    NotPmf(String),

    #[error("mean degree is zero; network would consist of isolated vertices")]
    ZeroMeanDegree,

    #[error("degree sequence is not realizable: {0}")]
    NotRealizable(String),

    #[error("retry budget exhausted after {attempts} attempts: {reason}")]
    BudgetExhausted { attempts: usize, reason: String },

    #[error("mean component size diverges at or above the threshold (T = {t}, T_c = {t_c})")]
    Supercritical { t: f64, t_c: f64 },

    #[error("iteration did not converge after {iterations} iterations (last change {change:e})")]
    NoConvergence { iterations: usize, change: f64 },

    #[error("numerical instability: {0}")]
    Unstable(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by bad user input rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::TruncationTail { .. }
                | Error::NotPmf(_)
                | Error::ZeroMeanDegree
                | Error::NotRealizable(_)
                | Error::Format(_)
                | Error::Json(_)
        )
    }
}
