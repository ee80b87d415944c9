//! STS evaluation by rank correlation, and augmentation coverage.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::augment::{augment_corpus, Augmenter, Method};
use crate::conllu::ParsedSentence;
use crate::detok::tokenize_plain;
use crate::rng::{stream_rng, SeededRng};
use crate::trainer::{cosine_similarity, ToyEncoder, TrainError, TrainingExample};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("lists have different lengths ({0} and {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least two observations, got {0}")]
    TooShort(usize),
    #[error("correlation is undefined for a constant list")]
    Constant,
    #[error("no examples")]
    Empty,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Train(#[from] TrainError),
}

/// 1-based ranks; tied values share the mean of their positions.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && xs[order[end]] == xs[order[start]] {
            end += 1;
        }
        // Positions start+1 ..= end.
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

fn check_pair(xs: &[f64], ys: &[f64]) -> Result<(), EvalError> {
    if xs.len() != ys.len() {
        return Err(EvalError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(EvalError::TooShort(xs.len()));
    }
    Ok(())
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, EvalError> {
    check_pair(xs, ys)?;
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(EvalError::Constant);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rank correlation: Pearson correlation of average ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64, EvalError> {
    check_pair(xs, ys)?;
    pearson(&average_ranks(xs), &average_ranks(ys))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StsExample {
    pub sentence1: Vec<String>,
    pub sentence2: Vec<String>,
    pub gold: f64,
}

/// Three-column TSV: sentence1, sentence2, gold score.
pub fn parse_sts_tsv(text: &str) -> Result<Vec<StsExample>, EvalError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| EvalError::Parse { line: line_no, message };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(err(format!("expected 3 tab-separated columns, found {}", cols.len())));
        }
        let gold: f64 = cols[2]
            .trim()
            .parse()
            .map_err(|_| err(format!("invalid score {:?}", cols[2])))?;
        if !gold.is_finite() {
            return Err(err("score must be finite".into()));
        }
        let (sentence1, sentence2) = (tokenize_plain(cols[0]), tokenize_plain(cols[1]));
        if sentence1.is_empty() || sentence2.is_empty() {
            return Err(err("empty sentence".into()));
        }
        out.push(StsExample {
            sentence1,
            sentence2,
            gold,
        });
    }
    Ok(out)
}

/// Spearman correlation between eval-mode cosine scores and gold scores.
pub fn evaluate_sts(encoder: &ToyEncoder, examples: &[StsExample]) -> Result<f64, EvalError> {
    if examples.is_empty() {
        return Err(EvalError::Empty);
    }
    let predicted = examples
        .par_iter()
        .map(|ex| {
            let a = encoder.embed(&ex.sentence1)?;
            let b = encoder.embed(&ex.sentence2)?;
            cosine_similarity(&a, &b)
        })
        .collect::<Result<Vec<f64>, TrainError>>()?;
    let gold: Vec<f64> = examples.iter().map(|ex| ex.gold).collect();
    spearman(&predicted, &gold)
}

/// Mean eval-mode cosine of true (anchor, positive) pairs and of
/// mismatched pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alignment {
    pub positive: f64,
    pub random: f64,
}

/// Compares every anchor with its own positive and with the positive of
/// another, randomly chosen, example.
pub fn alignment(encoder: &ToyEncoder, examples: &[TrainingExample], seed: u64) -> Result<Alignment, EvalError> {
    if examples.len() < 2 {
        return Err(EvalError::TooShort(examples.len()));
    }
    let mut rng: SeededRng = stream_rng(seed, 0);
    let n = examples.len();
    let (mut pos, mut rand) = (0.0, 0.0);
    for (i, ex) in examples.iter().enumerate() {
        let other = (i + rng.gen_range(1..n)) % n;
        let h = encoder.embed(&ex.anchor)?;
        pos += cosine_similarity(&h, &encoder.embed(&ex.positive)?)?;
        rand += cosine_similarity(&h, &encoder.embed(&examples[other].positive)?)?;
    }
    Ok(Alignment {
        positive: pos / n as f64,
        random: rand / n as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub method: Method,
    pub total: usize,
    pub changed: usize,
    pub percent: f64,
}

/// Share of the corpus the augmenter changes.
pub fn coverage_stats(
    sentences: &[ParsedSentence],
    augmenter: &Augmenter,
    seed: u64,
) -> Result<CoverageReport, EvalError> {
    if sentences.is_empty() {
        return Err(EvalError::Empty);
    }
    let pairs = augment_corpus(sentences, augmenter, seed);
    let changed = pairs.iter().filter(|p| p.changed).count();
    Ok(CoverageReport {
        method: augmenter.method(),
        total: pairs.len(),
        changed,
        percent: changed as f64 * 100.0 / pairs.len() as f64,
    })
}
