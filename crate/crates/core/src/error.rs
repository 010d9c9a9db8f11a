use thiserror::Error;

use crate::lattice::QField;

#[derive(Debug, Error)]
pub enum HqmError {
    #[error("configuration error in `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Quaternion residue that a real-valued quantity must not carry.
    #[error("non-real residue {residue:e} in {what} exceeds {tolerance:e}")]
    NonReal {
        what: &'static str,
        residue: f64,
        tolerance: f64,
    },

    #[error("evolution diverged at t = {t} (last norms: {norm_history:?})")]
    Divergence {
        t: f64,
        norm_history: Vec<f64>,
        last_finite: Box<QField>,
    },
}

impl HqmError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, HqmError>;
