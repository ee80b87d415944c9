//! Encoder checkpoints as a JSON tensor dump.

use serde::{Deserialize, Serialize};

use super::encoder::{ToyEncoder, Vocabulary};
use super::TrainError;

pub const FORMAT: &str = "sda-toy-encoder";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub dim: usize,
    pub vocab_size: usize,
    pub dropout_rate: f64,
    pub seed: u64,
    pub vocab: Vec<String>,
    /// `vocab_size x dim`, row-major.
    pub embedding: Vec<f64>,
    /// `dim x dim`, row-major.
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Checkpoint {
    pub fn from_encoder(encoder: &ToyEncoder, seed: u64) -> Self {
        Checkpoint {
            format: FORMAT.to_owned(),
            version: VERSION,
            dim: encoder.dim,
            vocab_size: encoder.vocab.len(),
            dropout_rate: encoder.dropout_rate,
            seed,
            vocab: encoder.vocab.words().to_vec(),
            embedding: encoder.embedding.clone(),
            weight: encoder.weight.clone(),
            bias: encoder.bias.clone(),
        }
    }

    pub fn into_encoder(self) -> Result<ToyEncoder, TrainError> {
        if self.format != FORMAT || self.version != VERSION {
            return Err(TrainError::Checkpoint(format!(
                "unsupported format {} version {}",
                self.format, self.version
            )));
        }
        if self.vocab.len() != self.vocab_size {
            return Err(TrainError::Checkpoint(format!(
                "header says {} words, found {}",
                self.vocab_size,
                self.vocab.len()
            )));
        }
        let vocab = Vocabulary::from_words(self.vocab)?;
        ToyEncoder::from_parts(vocab, self.dim, self.embedding, self.weight, self.bias, self.dropout_rate)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("checkpoint serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, TrainError> {
        serde_json::from_str(text)
            .map_err(|e| TrainError::Checkpoint(format!("line {}: {e}", e.line())))
    }
}
