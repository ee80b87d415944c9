//! Mean-pooling sentence encoder with a train-only projection head.
//!
//! Train mode: mean of token embeddings, dropout mask, affine map, tanh.
//! Eval mode: mean of token embeddings only.

use std::collections::HashMap;

use rand::Rng;

use super::TrainError;
use crate::rng::{stream_rng, INIT_STREAM};

pub const UNK: &str = "<unk>";

/// Lower-cased token to row id. Row 0 is reserved for unknown tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Builds a vocabulary from every token seen, ordered lexicographically
    /// after the unknown-token row.
    pub fn build<'a, I>(tokens: I) -> Self
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut words: Vec<String> = tokens.into_iter().map(str::to_lowercase).collect();
        words.sort_unstable();
        words.dedup();
        words.retain(|w| w != UNK);
        words.insert(0, UNK.to_owned());
        Self::from_words(words).expect("built vocabulary is well formed")
    }

    /// Restores a vocabulary from its row order; row 0 must be the unknown token.
    pub fn from_words(words: Vec<String>) -> Result<Self, TrainError> {
        if words.first().map(String::as_str) != Some(UNK) {
            return Err(TrainError::Checkpoint(format!("vocabulary must start with {UNK}")));
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(TrainError::Checkpoint(format!("duplicate vocabulary entry {w:?}")));
            }
        }
        Ok(Vocabulary { words, index })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id(&self, token: &str) -> usize {
        self.index.get(&token.to_lowercase()).copied().unwrap_or(0)
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// Inverted dropout mask: each entry is 0 or `1 / (1 - p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DropoutMask {
    scale: Vec<f64>,
}

impl DropoutMask {
    /// All units kept at scale 1.
    pub fn keep_all(dim: usize) -> Self {
        DropoutMask {
            scale: vec![1.0; dim],
        }
    }

    pub fn sample<R: Rng + ?Sized>(dim: usize, rate: f64, rng: &mut R) -> Self {
        if rate <= 0.0 {
            return Self::keep_all(dim);
        }
        let kept = 1.0 / (1.0 - rate);
        let scale = (0..dim)
            .map(|_| if rng.gen_bool(rate) { 0.0 } else { kept })
            .collect();
        DropoutMask { scale }
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        v.iter().zip(&self.scale).map(|(x, s)| x * s).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector(pub Vec<f64>);

impl EmbeddingVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

/// Address of one scalar parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    Embedding { row: usize, col: usize },
    Weight { row: usize, col: usize },
    Bias(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToyEncoder {
    pub(crate) vocab: Vocabulary,
    pub(crate) dim: usize,
    /// `|V| x dim`, row-major.
    pub(crate) embedding: Vec<f64>,
    /// `dim x dim`, row-major; output `r` reads row `r`.
    pub(crate) weight: Vec<f64>,
    pub(crate) bias: Vec<f64>,
    pub(crate) dropout_rate: f64,
}

/// Intermediate values of one train-mode forward pass.
#[derive(Debug, Clone)]
pub(crate) struct ForwardCache {
    pub ids: Vec<usize>,
    pub mask: DropoutMask,
    pub masked: Vec<f64>,
    pub output: Vec<f64>,
}

impl ToyEncoder {
    /// Random initialization: embeddings uniform in [-1, 1], projector
    /// Glorot-uniform, bias zero.
    pub fn init(vocab: Vocabulary, dim: usize, dropout_rate: f64, seed: u64) -> Self {
        let mut rng = stream_rng(seed, INIT_STREAM);
        let embedding = (0..vocab.len() * dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let limit = (3.0 / dim as f64).sqrt();
        let weight = (0..dim * dim).map(|_| rng.gen_range(-limit..limit)).collect();
        ToyEncoder {
            vocab,
            dim,
            embedding,
            weight,
            bias: vec![0.0; dim],
            dropout_rate,
        }
    }

    /// Assembles an encoder from explicit tensors.
    pub fn from_parts(
        vocab: Vocabulary,
        dim: usize,
        embedding: Vec<f64>,
        weight: Vec<f64>,
        bias: Vec<f64>,
        dropout_rate: f64,
    ) -> Result<Self, TrainError> {
        let shape_err = |what: &str, got: usize, want: usize| {
            TrainError::Checkpoint(format!("{what} has {got} values, expected {want}"))
        };
        if dim == 0 {
            return Err(TrainError::Checkpoint("dimension must be positive".into()));
        }
        if embedding.len() != vocab.len() * dim {
            return Err(shape_err("embedding", embedding.len(), vocab.len() * dim));
        }
        if weight.len() != dim * dim {
            return Err(shape_err("projector", weight.len(), dim * dim));
        }
        if bias.len() != dim {
            return Err(shape_err("bias", bias.len(), dim));
        }
        if !(0.0..1.0).contains(&dropout_rate) {
            return Err(TrainError::Checkpoint(format!("dropout rate {dropout_rate} outside [0, 1)")));
        }
        let encoder = ToyEncoder {
            vocab,
            dim,
            embedding,
            weight,
            bias,
            dropout_rate,
        };
        if !encoder.is_finite() {
            return Err(TrainError::Checkpoint("non-finite parameter".into()));
        }
        Ok(encoder)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dropout_rate(&self) -> f64 {
        self.dropout_rate
    }

    pub fn embedding_row(&self, id: usize) -> &[f64] {
        &self.embedding[id * self.dim..(id + 1) * self.dim]
    }

    pub fn embedding_row_mut(&mut self, id: usize) -> &mut [f64] {
        &mut self.embedding[id * self.dim..(id + 1) * self.dim]
    }

    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    pub fn weight_mut(&mut self) -> &mut [f64] {
        &mut self.weight
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.bias
    }

    pub fn is_finite(&self) -> bool {
        self.embedding
            .iter()
            .chain(&self.weight)
            .chain(&self.bias)
            .all(|x| x.is_finite())
    }

    pub fn param(&self, p: Param) -> f64 {
        match p {
            Param::Embedding { row, col } => self.embedding[row * self.dim + col],
            Param::Weight { row, col } => self.weight[row * self.dim + col],
            Param::Bias(i) => self.bias[i],
        }
    }

    pub fn param_mut(&mut self, p: Param) -> &mut f64 {
        match p {
            Param::Embedding { row, col } => &mut self.embedding[row * self.dim + col],
            Param::Weight { row, col } => &mut self.weight[row * self.dim + col],
            Param::Bias(i) => &mut self.bias[i],
        }
    }

    pub fn token_ids<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<usize> {
        tokens.iter().map(|t| self.vocab.id(t.as_ref())).collect()
    }

    fn mean_pool(&self, ids: &[usize]) -> Vec<f64> {
        let mut pooled = vec![0.0; self.dim];
        for &id in ids {
            for (acc, x) in pooled.iter_mut().zip(self.embedding_row(id)) {
                *acc += x;
            }
        }
        let n = ids.len() as f64;
        pooled.iter_mut().for_each(|x| *x /= n);
        pooled
    }

    pub(crate) fn forward_train(&self, ids: Vec<usize>, mask: &DropoutMask) -> ForwardCache {
        let masked = mask.apply(&self.mean_pool(&ids));
        let output = (0..self.dim)
            .map(|r| {
                let row = &self.weight[r * self.dim..(r + 1) * self.dim];
                let a: f64 = row.iter().zip(&masked).map(|(w, u)| w * u).sum::<f64>() + self.bias[r];
                a.tanh()
            })
            .collect();
        ForwardCache {
            ids,
            mask: mask.clone(),
            masked,
            output,
        }
    }

    /// Encodes a token sequence.
    pub fn encode<S: AsRef<str>>(
        &self,
        tokens: &[S],
        mask: &DropoutMask,
        mode: Mode,
    ) -> Result<EmbeddingVector, TrainError> {
        if tokens.is_empty() {
            return Err(TrainError::EmptyInput);
        }
        if mask.scale.len() != self.dim {
            return Err(TrainError::Shape(format!(
                "mask has {} entries, encoder dimension is {}",
                mask.scale.len(),
                self.dim
            )));
        }
        let ids = self.token_ids(tokens);
        Ok(EmbeddingVector(match mode {
            Mode::Eval => self.mean_pool(&ids),
            Mode::Train => self.forward_train(ids, mask).output,
        }))
    }

    /// Eval-mode encoding.
    pub fn embed<S: AsRef<str>>(&self, tokens: &[S]) -> Result<EmbeddingVector, TrainError> {
        self.encode(tokens, &DropoutMask::keep_all(self.dim), Mode::Eval)
    }
}
