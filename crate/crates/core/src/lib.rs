//! Associative memory built from one cluster of cue neurons (the cue
//! ball) and several image-sized recall nets.
//!
//! Each cue neuron learns, in a single gradient step per direction, a
//! bidirectional association with one pattern per recall net: its forward
//! weight column becomes the pattern itself, and its backward weight row
//! is adjusted so the cue's response to that pattern equals the learning
//! target. Presenting any stored image (whole or half-hidden) to one net
//! then singles out the owning cue, and that cue replays the images it
//! stores on every net at once.
//!
//! The numeric core is generic over [`scalar::Real`] (`f32` or `f64`);
//! every type defaults to `f64`, which is what the weight-file format and
//! the CLI use.

pub mod analysis;
pub mod error;
pub mod imaging;
pub mod ingest;
pub mod learning;
pub mod model;
pub mod persistence;
pub mod recall;
pub mod scalar;

pub use error::{Error, Result};
pub use ingest::{parse_idx_images, parse_idx_labels, partition, GroupedDataset, RawImageSet};
pub use learning::{train_backward, train_corpus, train_forward, TrainingReport};
pub use model::{
    cue_response, forward, threshold_activate, BackwardWeights, CueActivation, ForwardWeights,
    ModelParams, Pattern,
};
pub use persistence::{load_weights, save_backward, save_forward, WeightFileHeader, WeightKind};
pub use recall::{recall, recall_partial, PresentationMask, RecallResult};
pub use scalar::Real;

/// Scalar used by the weight-file format and the CLI.
pub type DefaultScalar = f64;
