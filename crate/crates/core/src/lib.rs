//! Syntax-guided sentence augmentation for contrastive sentence embeddings.
//!
//! - [`conllu`]: dependency parses in CoNLL-U form.
//! - [`augment`]: punctuation insertion, affirmative auxiliary and double
//!   negation rewrites, plus corpus-level drivers.
//! - [`baselines`]: crop, deletion, synonym, mask, repetition and random
//!   punctuation augmenters for comparison.
//! - [`trainer`]: a small encoder trained with in-batch InfoNCE.
//! - [`eval`]: Spearman correlation on STS pairs and coverage counts.

pub mod augment;
pub mod baselines;
pub mod conllu;
pub mod detok;
pub mod error;
pub mod eval;
pub mod rng;
pub mod synth;
pub mod trainer;

#[cfg(test)]
mod testing;

pub use error::ConfigError;
