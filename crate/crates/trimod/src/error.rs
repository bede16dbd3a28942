use crate::window::IndexWindow;
use thiserror::Error;

/// Errors surfaced by matrix, weight and series constructors.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid window [{lo},{hi}]: need hi - lo >= 1")]
    BadWindow { lo: i32, hi: i32 },

    #[error("index pair ({k},{n}) outside window {window} or not strictly upper (k < n)")]
    IndexOutOfWindow { k: i32, n: i32, window: IndexWindow },

    #[error("window mismatch: {left} vs {right}")]
    WindowMismatch {
        left: IndexWindow,
        right: IndexWindow,
    },

    #[error("window {inner} is not strictly contained in {outer}")]
    NotContained {
        inner: IndexWindow,
        outer: IndexWindow,
    },

    #[error("weight b({k},{n}) requires k < n")]
    BadWeightIndex { k: i32, n: i32 },

    #[error("weight b({k},{n}) is not available in this configuration")]
    MissingWeight { k: i32, n: i32 },

    #[error("invalid weight configuration: {0}")]
    BadConfig(String),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
