//! Rule-based positive generation.
//!
//! Each method rewrites a parsed sentence into a close variant. When no rule
//! applies the sentence is paired with itself.

pub mod affirm;
pub mod invariants;
pub mod lexicon;
pub mod negation;
pub mod punct;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{apply_baseline_rewrite, BaselineKind, BaselineSpec};
use crate::conllu::{ParsedSentence, SentenceEdit};
use crate::detok::detokenize;
use crate::error::ConfigError;
use crate::rng::sentence_rng;

pub use affirm::{affirmative_auxiliary, rewrite_affirmative};
pub use lexicon::{AuxEntry, AuxLexicon, LexiconError, NegLexicon, SynonymLexicon};
pub use negation::{double_negation, rewrite_double_negation};
pub use punct::{apply_pi_rule, punctuation_insertion, rewrite_punctuation, PiRule, RuleStrategy, SubjectMark};

/// Augmentation method. The serialized names double as command-line names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Pi,
    Aa,
    Dn,
    Identity,
    Crop,
    Del,
    Syn,
    Mask,
    Rep,
    Randpunct,
}

impl Method {
    pub const ALL: [Method; 10] = [
        Method::Pi,
        Method::Aa,
        Method::Dn,
        Method::Identity,
        Method::Crop,
        Method::Del,
        Method::Syn,
        Method::Mask,
        Method::Rep,
        Method::Randpunct,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Pi => "pi",
            Method::Aa => "aa",
            Method::Dn => "dn",
            Method::Identity => "identity",
            Method::Crop => "crop",
            Method::Del => "del",
            Method::Syn => "syn",
            Method::Mask => "mask",
            Method::Rep => "rep",
            Method::Randpunct => "randpunct",
        }
    }

    pub fn baseline_kind(self) -> Option<BaselineKind> {
        match self {
            Method::Crop => Some(BaselineKind::Crop),
            Method::Del => Some(BaselineKind::WordDeletion),
            Method::Syn => Some(BaselineKind::SynonymReplacement),
            Method::Mask => Some(BaselineKind::Mask),
            Method::Rep => Some(BaselineKind::WordRepetition),
            Method::Randpunct => Some(BaselineKind::RandomPunctInsertion),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| ConfigError::new(format!("unknown method {s:?}")))
    }
}

/// An anchor sentence and its positive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentedPair {
    pub anchor: String,
    pub positive: String,
    pub method: Method,
    pub changed: bool,
}

impl AugmentedPair {
    pub fn identity(anchor: String) -> Self {
        AugmentedPair {
            positive: anchor.clone(),
            anchor,
            method: Method::Identity,
            changed: false,
        }
    }
}

/// Builds the pair for `original` and an optional rewrite. A rewrite that
/// realizes to the same string counts as no change.
pub(crate) fn lexical_pair(
    original: &ParsedSentence,
    rewritten: Option<&ParsedSentence>,
    method: Method,
) -> AugmentedPair {
    let anchor = detokenize(original);
    match rewritten.map(detokenize) {
        Some(positive) if positive != anchor => AugmentedPair {
            anchor,
            positive,
            method,
            changed: true,
        },
        _ => AugmentedPair::identity(anchor),
    }
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Carries sentence-initial capitalization over to whatever token now
/// starts the sentence.
pub(crate) fn restore_initial_case(original: &ParsedSentence, edit: &mut SentenceEdit) {
    let was_capitalized = original.tokens[0]
        .form
        .chars()
        .next()
        .is_some_and(char::is_uppercase);
    if was_capitalized && edit.id_at(0) != 0 {
        let first = edit.token_mut(0);
        first.form = capitalize(&first.form);
    }
}

/// Lexicons and knobs shared by all methods.
#[derive(Debug, Clone, Default)]
pub struct AugmentConfig {
    pub aux: AuxLexicon,
    pub neg: NegLexicon,
    pub strategy: RuleStrategy,
    /// Rate for crop, word deletion and mask.
    pub rate: Option<f64>,
    pub synonyms: Option<SynonymLexicon>,
}

/// A fully configured augmenter.
#[derive(Debug, Clone)]
pub enum Augmenter {
    Punctuation(RuleStrategy),
    AffirmativeAuxiliary(AuxLexicon),
    DoubleNegation(NegLexicon),
    Identity,
    Baseline(BaselineSpec),
}

impl Augmenter {
    pub fn new(method: Method, config: &AugmentConfig) -> Result<Self, ConfigError> {
        Ok(match method {
            Method::Pi => Augmenter::Punctuation(config.strategy),
            Method::Aa => Augmenter::AffirmativeAuxiliary(config.aux.clone()),
            Method::Dn => Augmenter::DoubleNegation(config.neg.clone()),
            Method::Identity => Augmenter::Identity,
            other => {
                let kind = other.baseline_kind().expect("remaining methods are baselines");
                let spec = BaselineSpec {
                    kind,
                    rate: config.rate,
                    lexicon: config.synonyms.clone(),
                };
                spec.validate()?;
                Augmenter::Baseline(spec)
            }
        })
    }

    pub fn method(&self) -> Method {
        match self {
            Augmenter::Punctuation(_) => Method::Pi,
            Augmenter::AffirmativeAuxiliary(_) => Method::Aa,
            Augmenter::DoubleNegation(_) => Method::Dn,
            Augmenter::Identity => Method::Identity,
            Augmenter::Baseline(spec) => spec.kind.method(),
        }
    }

    /// Rewritten sentence, or `None` when no rule applies.
    pub fn rewrite<R: Rng + ?Sized>(&self, sentence: &ParsedSentence, rng: &mut R) -> Option<ParsedSentence> {
        match self {
            Augmenter::Punctuation(strategy) => Some(rewrite_punctuation(sentence, rng, *strategy).0),
            Augmenter::AffirmativeAuxiliary(lexicon) => {
                let entries = lexicon.entries();
                let entry = &entries[rng.gen_range(0..entries.len())];
                rewrite_affirmative(sentence, entry)
            }
            Augmenter::DoubleNegation(lexicon) => rewrite_double_negation(sentence, lexicon),
            Augmenter::Identity => None,
            Augmenter::Baseline(spec) => apply_baseline_rewrite(sentence, spec, rng),
        }
    }

    pub fn augment<R: Rng + ?Sized>(&self, sentence: &ParsedSentence, rng: &mut R) -> AugmentedPair {
        let rewritten = self.rewrite(sentence, rng);
        lexical_pair(sentence, rewritten.as_ref(), self.method())
    }
}

/// One corpus entry after augmentation.
#[derive(Debug, Clone)]
pub struct Augmented {
    pub pair: AugmentedPair,
    /// The rewritten parse when the sentence changed.
    pub rewritten: Option<ParsedSentence>,
}

/// Augments every sentence; sentence `i` draws from the stream `(seed, i)`.
pub fn rewrite_corpus(sentences: &[ParsedSentence], augmenter: &Augmenter, seed: u64) -> Vec<Augmented> {
    sentences
        .par_iter()
        .enumerate()
        .map(|(i, sentence)| {
            let mut rng = sentence_rng(seed, i);
            let rewritten = augmenter.rewrite(sentence, &mut rng);
            let pair = lexical_pair(sentence, rewritten.as_ref(), augmenter.method());
            let rewritten = if pair.changed { rewritten } else { None };
            Augmented { pair, rewritten }
        })
        .collect()
}

pub fn augment_corpus(sentences: &[ParsedSentence], augmenter: &Augmenter, seed: u64) -> Vec<AugmentedPair> {
    rewrite_corpus(sentences, augmenter, seed)
        .into_iter()
        .map(|a| a.pair)
        .collect()
}

/// Writes pairs as JSON lines.
pub fn pairs_to_jsonl(pairs: &[AugmentedPair]) -> String {
    let mut out = String::new();
    for pair in pairs {
        out.push_str(&serde_json::to_string(pair).expect("pairs serialize"));
        out.push('\n');
    }
    out
}
