//! Desk-scale contrastive training: a mean-pooling encoder, in-batch
//! InfoNCE, manual backpropagation and plain SGD.

pub mod batch;
pub mod checkpoint;
pub mod config;
pub mod encoder;
mod grad;
pub mod gradcheck;
pub mod loss;
pub mod train;

use thiserror::Error;

pub use batch::{build_batch, uses_augmented, TrainingExample};
pub use checkpoint::Checkpoint;
pub use config::{parse_config, ConfigFile};
pub use encoder::{DropoutMask, EmbeddingVector, Mode, Param, ToyEncoder, Vocabulary, UNK};
pub use grad::{batch_loss, loss_and_gradients, Gradients, IdPair};
pub use gradcheck::{check_config, gradient_check, gradient_check_with, GradCheckReport};
pub use loss::{cosine_similarity, info_nce_from_similarities, info_nce_loss, InfoNce};
pub use train::{train, train_with, trace_csv, training_examples, vocabulary_of, TrainConfig, TrainOutput};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrainError {
    #[error("empty token list")]
    EmptyInput,
    #[error("cosine similarity is undefined for a zero vector")]
    ZeroVector,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("line {line}: {message}")]
    ConfigLine { line: usize, message: String },
    #[error("bad checkpoint: {0}")]
    Checkpoint(String),
}

impl From<crate::error::ConfigError> for TrainError {
    fn from(e: crate::error::ConfigError) -> Self {
        TrainError::Config(e.0)
    }
}
