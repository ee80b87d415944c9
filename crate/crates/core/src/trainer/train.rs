//! The training loop.

use rand::seq::SliceRandom;

use super::batch::{build_batch, TrainingExample};
use super::encoder::{DropoutMask, ToyEncoder, Vocabulary};
use super::grad::{loss_and_gradients, sgd_step, IdPair};
use super::TrainError;
use crate::augment::{rewrite_corpus, AugmentConfig, Augmenter, Method};
use crate::conllu::ParsedSentence;
use crate::rng::{stream_rng, DROPOUT_STREAM, SHUFFLE_STREAM};

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub temperature: f64,
    pub batch_size: usize,
    pub dropout_rate: f64,
    /// Share of examples trained against their augmented positive.
    pub augmentation_proportion: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub method: Method,
    pub dim: usize,
    pub augment: AugmentConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            temperature: 0.05,
            batch_size: 32,
            dropout_rate: 0.1,
            augmentation_proportion: 1.0,
            learning_rate: 0.05,
            epochs: 30,
            seed: 42,
            method: Method::Pi,
            dim: 64,
            augment: AugmentConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |m: String| Err(TrainError::Config(m));
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return bad(format!("temperature must be positive, got {}", self.temperature));
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return bad(format!("dropout_rate must be in [0, 1), got {}", self.dropout_rate));
        }
        if !(0.0..=1.0).contains(&self.augmentation_proportion) {
            return bad(format!(
                "augmentation_proportion must be in [0, 1], got {}",
                self.augmentation_proportion
            ));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning_rate must be non-negative, got {}", self.learning_rate));
        }
        if self.dim == 0 {
            return bad("dim must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub encoder: ToyEncoder,
    /// Mean batch loss at every step.
    pub trace: Vec<f64>,
    pub examples: Vec<TrainingExample>,
}

/// Augments the corpus and returns anchor/positive token lists.
pub fn training_examples(
    corpus: &[ParsedSentence],
    method: Method,
    augment: &AugmentConfig,
    seed: u64,
) -> Result<Vec<TrainingExample>, TrainError> {
    let augmenter = Augmenter::new(method, augment)?;
    let forms = |s: &ParsedSentence| s.forms().map(str::to_owned).collect::<Vec<_>>();
    Ok(corpus
        .iter()
        .zip(rewrite_corpus(corpus, &augmenter, seed))
        .map(|(s, a)| {
            let anchor = forms(s);
            let positive = a.rewritten.as_ref().map_or_else(|| anchor.clone(), forms);
            TrainingExample {
                anchor,
                positive,
                changed: a.pair.changed,
            }
        })
        .collect())
}

pub fn vocabulary_of(examples: &[TrainingExample]) -> Vocabulary {
    Vocabulary::build(
        examples
            .iter()
            .flat_map(|e| e.anchor.iter().chain(&e.positive))
            .map(String::as_str),
    )
}

pub fn train(corpus: &[ParsedSentence], config: &TrainConfig) -> Result<TrainOutput, TrainError> {
    train_with(corpus, config, |_, _| {})
}

/// As [`train`], calling `on_step(step, loss)` after every update.
pub fn train_with<F>(corpus: &[ParsedSentence], config: &TrainConfig, mut on_step: F) -> Result<TrainOutput, TrainError>
where
    F: FnMut(usize, f64),
{
    config.validate()?;
    if corpus.is_empty() {
        return Err(TrainError::Config("training corpus is empty".into()));
    }
    let examples = training_examples(corpus, config.method, &config.augment, config.seed)?;
    let mut encoder = ToyEncoder::init(vocabulary_of(&examples), config.dim, config.dropout_rate, config.seed);

    let mut shuffle = stream_rng(config.seed, SHUFFLE_STREAM);
    let mut dropout = stream_rng(config.seed, DROPOUT_STREAM);
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut trace = Vec::new();

    for epoch in 0..config.epochs {
        order.shuffle(&mut shuffle);
        for indices in order.chunks(config.batch_size) {
            let batch: Vec<IdPair> = build_batch(&examples, config.augmentation_proportion, config.seed, indices)
                .into_iter()
                .map(|(a, p)| (encoder.token_ids(&a), encoder.token_ids(&p)))
                .collect();
            let masks: Vec<(DropoutMask, DropoutMask)> = batch
                .iter()
                .map(|_| {
                    let a = DropoutMask::sample(config.dim, config.dropout_rate, &mut dropout);
                    let p = DropoutMask::sample(config.dim, config.dropout_rate, &mut dropout);
                    (a, p)
                })
                .collect();
            let (loss, grads) = loss_and_gradients(&encoder, &batch, &masks, config.temperature)?;
            sgd_step(&mut encoder, &grads, config.learning_rate);
            trace.push(loss.mean);
            on_step(trace.len(), loss.mean);
        }
        if !encoder.is_finite() {
            return Err(TrainError::Config(format!("parameters diverged in epoch {}", epoch + 1)));
        }
    }
    Ok(TrainOutput {
        encoder,
        trace,
        examples,
    })
}

/// `step,loss` CSV with 1-based steps.
pub fn trace_csv(trace: &[f64]) -> String {
    let mut out = String::from("step,loss\n");
    for (i, loss) in trace.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 1, loss));
    }
    out
}
