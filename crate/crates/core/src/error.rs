//! Error type shared across the crate.

use crate::persistence::WeightKind;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} index {got} out of range (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("dimension mismatch: expected {expected} values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("pattern {pattern} is not unit-normalized: |sum of squares - 1| = {deviation:e}")]
    NotNormalized { pattern: usize, deviation: f64 },

    #[error("pattern {pattern} has negative intensity at pixel {pixel}")]
    NegativeIntensity { pattern: usize, pixel: usize },

    #[error("image {index} is all zero and cannot be normalized")]
    ZeroImage { index: usize },

    #[error("masked probe is all zero and cannot be renormalized")]
    ZeroProbe,

    #[error("training did not converge after {steps} steps (error {error:e})")]
    NonConvergence { steps: usize, error: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("IDX format error: {0}")]
    IdxFormat(String),

    #[error("IDX payload length mismatch: expected {expected} bytes, got {got}")]
    IdxLength { expected: usize, got: usize },

    #[error("dataset too small: need {needed} images, file holds {available}")]
    Capacity { needed: usize, available: usize },

    #[error("weight file format error: {0}")]
    WeightFormat(String),

    #[error("weight file corrupted: {0}")]
    WeightCorruption(String),

    #[error("weight kind mismatch: expected {expected}, found {found}")]
    KindMismatch {
        expected: WeightKind,
        found: WeightKind,
    },

    #[error("I/O failure after {written} bytes: {source}")]
    Io {
        written: usize,
        #[source]
        source: std::io::Error,
    },

    #[error("while training group {group}, cue {cue}, pattern {pattern}: {source}")]
    TrainingContext {
        group: usize,
        cue: usize,
        pattern: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(written: usize, source: std::io::Error) -> Self {
        Error::Io { written, source }
    }
}
