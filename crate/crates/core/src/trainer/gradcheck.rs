//! Central-difference check of the analytic gradient.

use std::collections::BTreeSet;

use rand::seq::index::sample;

use super::batch::build_batch;
use super::config::ConfigFile;
use super::encoder::{DropoutMask, Param, ToyEncoder};
use super::train::{training_examples, vocabulary_of};
use super::grad::{batch_loss, loss_and_gradients, Gradients, IdPair};
use super::loss::InfoNce;
use super::TrainError;
use crate::conllu::ParsedSentence;
use crate::rng::{stream_rng, GRADCHECK_STREAM};

pub const STEP: f64 = 1e-5;
pub const DEFAULT_TOLERANCE: f64 = 1e-4;
pub const DEFAULT_SAMPLES: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub checked: usize,
    pub tolerance: f64,
    pub max_relative_error: f64,
    /// Parameter with the largest relative error.
    pub worst: Option<Param>,
    /// Every parameter whose error reached the tolerance.
    pub offending: Vec<Param>,
    pub passed: bool,
}

/// `|a - n| / max(|a|, |n|, 1e-6)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
}

/// Parameters that can receive gradient from `batch`: the embedding rows
/// of its tokens, the projector and the bias.
fn active_parameters(encoder: &ToyEncoder, batch: &[IdPair]) -> Vec<Param> {
    let rows: BTreeSet<usize> = batch.iter().flat_map(|(a, p)| a.iter().chain(p)).copied().collect();
    let dim = encoder.dim();
    let mut params: Vec<Param> = rows
        .into_iter()
        .flat_map(|row| (0..dim).map(move |col| Param::Embedding { row, col }))
        .collect();
    params.extend((0..dim).flat_map(|row| (0..dim).map(move |col| Param::Weight { row, col })));
    params.extend((0..dim).map(Param::Bias));
    params
}

/// Checks the trainer's gradient on `samples` random active parameters with
/// dropout disabled.
pub fn gradient_check(
    encoder: &ToyEncoder,
    batch: &[(Vec<String>, Vec<String>)],
    temperature: f64,
    tolerance: f64,
    samples: usize,
    seed: u64,
) -> Result<GradCheckReport, TrainError> {
    gradient_check_with(encoder, batch, temperature, tolerance, samples, seed, loss_and_gradients)
}

/// As [`gradient_check`], with the analytic gradient supplied by `analytic`.
pub fn gradient_check_with<F>(
    encoder: &ToyEncoder,
    batch: &[(Vec<String>, Vec<String>)],
    temperature: f64,
    tolerance: f64,
    samples: usize,
    seed: u64,
    analytic: F,
) -> Result<GradCheckReport, TrainError>
where
    F: Fn(&ToyEncoder, &[IdPair], &[(DropoutMask, DropoutMask)], f64) -> Result<(InfoNce, Gradients), TrainError>,
{
    // Written negated so NaN is rejected too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(tolerance > 0.0) {
        return Err(TrainError::Config(format!("tolerance must be positive, got {tolerance}")));
    }
    if !encoder.is_finite() {
        return Err(TrainError::Config("encoder has non-finite parameters".into()));
    }
    let mut encoder = encoder.clone();
    encoder.dropout_rate = 0.0;
    let ids: Vec<IdPair> = batch
        .iter()
        .map(|(a, p)| (encoder.token_ids(a), encoder.token_ids(p)))
        .collect();
    let masks = vec![(DropoutMask::keep_all(encoder.dim()), DropoutMask::keep_all(encoder.dim())); ids.len()];
    let (_, grads) = analytic(&encoder, &ids, &masks, temperature)?;

    let active = active_parameters(&encoder, &ids);
    let mut rng = stream_rng(seed, GRADCHECK_STREAM);
    let chosen = sample(&mut rng, active.len(), samples.min(active.len()));

    let mut report = GradCheckReport {
        checked: 0,
        tolerance,
        max_relative_error: 0.0,
        worst: None,
        offending: Vec::new(),
        passed: true,
    };
    for k in chosen.iter() {
        let p = active[k];
        let original = encoder.param(p);
        *encoder.param_mut(p) = original + STEP;
        let up = batch_loss(&encoder, &ids, &masks, temperature)?.mean;
        *encoder.param_mut(p) = original - STEP;
        let down = batch_loss(&encoder, &ids, &masks, temperature)?.mean;
        *encoder.param_mut(p) = original;

        let numeric = (up - down) / (2.0 * STEP);
        let err = relative_error(grads.get(p), numeric);
        report.checked += 1;
        if report.worst.is_none() || err > report.max_relative_error {
            report.max_relative_error = err;
            report.worst = Some(p);
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(err < tolerance) {
            report.offending.push(p);
            report.passed = false;
        }
    }
    Ok(report)
}

/// Gradient check of a freshly initialized encoder on the first batch of
/// `corpus`, as configured.
pub fn check_config(corpus: &[ParsedSentence], config: &ConfigFile) -> Result<GradCheckReport, TrainError> {
    let t = &config.train;
    t.validate()?;
    if corpus.is_empty() {
        return Err(TrainError::Config("corpus is empty".into()));
    }
    let examples = training_examples(corpus, t.method, &t.augment, t.seed)?;
    let encoder = ToyEncoder::init(vocabulary_of(&examples), t.dim, t.dropout_rate, t.seed);
    let indices: Vec<usize> = (0..examples.len().min(t.batch_size)).collect();
    let batch = build_batch(&examples, t.augmentation_proportion, t.seed, &indices);
    gradient_check(&encoder, &batch, t.temperature, config.tolerance, config.check_samples, t.seed)
}
