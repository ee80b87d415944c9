//! Flat `key = value` configuration files.
//!
//! ```text
//! # comment
//! method = pi
//! temperature = 0.05
//! aux_lexicon = lexicons/aux.tsv
//! ```
//!
//! Unknown keys and repeated keys are errors. Lexicon and corpus paths are
//! returned as written; callers resolve them against the file's directory.

use std::str::FromStr;

use super::gradcheck::{DEFAULT_SAMPLES, DEFAULT_TOLERANCE};
use super::train::TrainConfig;
use super::TrainError;
use crate::augment::{Method, RuleStrategy};

#[derive(Debug, Clone)]
pub struct ConfigFile {
    pub train: TrainConfig,
    pub aux_lexicon: Option<String>,
    pub neg_lexicon: Option<String>,
    pub syn_lexicon: Option<String>,
    /// Corpus for the gradient check; a synthetic one is used when absent.
    pub corpus: Option<String>,
    pub tolerance: f64,
    pub check_samples: usize,
}

impl Default for ConfigFile {
    fn default() -> Self {
        ConfigFile {
            train: TrainConfig::default(),
            aux_lexicon: None,
            neg_lexicon: None,
            syn_lexicon: None,
            corpus: None,
            tolerance: DEFAULT_TOLERANCE,
            check_samples: DEFAULT_SAMPLES,
        }
    }
}

fn value<T: FromStr>(line: usize, key: &str, raw: &str) -> Result<T, TrainError> {
    raw.parse().map_err(|_| TrainError::ConfigLine {
        line,
        message: format!("invalid value {raw:?} for {key}"),
    })
}

fn strategy(line: usize, raw: &str) -> Result<RuleStrategy, TrainError> {
    match raw {
        "cascade" => Ok(RuleStrategy::Cascade),
        "random" | "uniform_random" => Ok(RuleStrategy::UniformRandom),
        _ => Err(TrainError::ConfigLine {
            line,
            message: format!("unknown strategy {raw:?}"),
        }),
    }
}

pub fn parse_config(text: &str) -> Result<ConfigFile, TrainError> {
    let mut cfg = ConfigFile::default();
    let mut seen = std::collections::HashSet::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw_line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, raw) = trimmed.split_once('=').ok_or_else(|| TrainError::ConfigLine {
            line,
            message: format!("expected key = value, got {trimmed:?}"),
        })?;
        let (key, raw) = (key.trim(), raw.trim());
        if !seen.insert(key.to_owned()) {
            return Err(TrainError::ConfigLine {
                line,
                message: format!("duplicate key {key}"),
            });
        }
        let t = &mut cfg.train;
        match key {
            "temperature" => t.temperature = value(line, key, raw)?,
            "batch_size" => t.batch_size = value(line, key, raw)?,
            "dropout_rate" => t.dropout_rate = value(line, key, raw)?,
            "augmentation_proportion" => t.augmentation_proportion = value(line, key, raw)?,
            "learning_rate" => t.learning_rate = value(line, key, raw)?,
            "epochs" => t.epochs = value(line, key, raw)?,
            "seed" => t.seed = value(line, key, raw)?,
            "dim" => t.dim = value(line, key, raw)?,
            "method" => {
                t.method = Method::from_str(raw).map_err(|e| TrainError::ConfigLine { line, message: e.0 })?
            }
            "strategy" => t.augment.strategy = strategy(line, raw)?,
            "rate" => t.augment.rate = Some(value(line, key, raw)?),
            "aux_lexicon" => cfg.aux_lexicon = Some(raw.to_owned()),
            "neg_lexicon" => cfg.neg_lexicon = Some(raw.to_owned()),
            "syn_lexicon" => cfg.syn_lexicon = Some(raw.to_owned()),
            "corpus" => cfg.corpus = Some(raw.to_owned()),
            "tolerance" => cfg.tolerance = value(line, key, raw)?,
            "check_samples" => cfg.check_samples = value(line, key, raw)?,
            _ => {
                return Err(TrainError::ConfigLine {
                    line,
                    message: format!("unknown key {key}"),
                })
            }
        }
    }
    cfg.train.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_known_keys() {
        let cfg = parse_config("# run\nmethod = dn\n temperature=0.1\nepochs = 3\nseed = 7\nstrategy = random\n").unwrap();
        assert_eq!(cfg.train.method, Method::Dn);
        assert_eq!(cfg.train.temperature, 0.1);
        assert_eq!(cfg.train.epochs, 3);
        assert_eq!(cfg.train.seed, 7);
        assert_eq!(cfg.train.augment.strategy, RuleStrategy::UniformRandom);
        assert_eq!(cfg.train.batch_size, 32);
        assert_eq!(cfg.tolerance, 1e-4);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_config("epochs = 2\n\nwarmup = 3\n").unwrap_err();
        assert_eq!(err, TrainError::ConfigLine { line: 3, message: "unknown key warmup".into() });
        assert!(matches!(parse_config("seed = x"), Err(TrainError::ConfigLine { line: 1, .. })));
        assert!(matches!(parse_config("seed = 1\nseed = 2"), Err(TrainError::ConfigLine { line: 2, .. })));
        assert!(matches!(parse_config("just words"), Err(TrainError::ConfigLine { line: 1, .. })));
        assert!(matches!(parse_config("temperature = -1"), Err(TrainError::Config(_))));
    }
}
