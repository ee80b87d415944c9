//! Comparison augmenters: cropping, word deletion, synonym replacement,
//! masking, word repetition and random punctuation insertion.

use rand::Rng;

use crate::augment::{lexical_pair, AugmentedPair, Method, SynonymLexicon};
use crate::conllu::{NewToken, ParsedSentence, SentenceEdit};
use crate::error::ConfigError;

pub const MASK_TOKEN: &str = "[MASK]";

/// Candidate marks for random punctuation insertion.
pub const PUNCTUATION_POOL: &[&str] = &[
    "!", "\"", "#", "$", "%", "&", "'", "(", ")", "*", "+", ",", "-", ".", "/", ":", ";", "<", "=",
    ">", "?", "@", "[", "\\", "]", "^", "_", "`", "{", "|", "}", "~",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    Crop,
    WordDeletion,
    SynonymReplacement,
    Mask,
    WordRepetition,
    RandomPunctInsertion,
}

impl BaselineKind {
    pub fn method(self) -> Method {
        match self {
            BaselineKind::Crop => Method::Crop,
            BaselineKind::WordDeletion => Method::Del,
            BaselineKind::SynonymReplacement => Method::Syn,
            BaselineKind::Mask => Method::Mask,
            BaselineKind::WordRepetition => Method::Rep,
            BaselineKind::RandomPunctInsertion => Method::Randpunct,
        }
    }

    fn uses_rate(self) -> bool {
        matches!(self, BaselineKind::Crop | BaselineKind::WordDeletion | BaselineKind::Mask)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineSpec {
    pub kind: BaselineKind,
    pub rate: Option<f64>,
    pub lexicon: Option<SynonymLexicon>,
}

impl BaselineSpec {
    pub fn new(kind: BaselineKind) -> Self {
        BaselineSpec {
            kind,
            rate: None,
            lexicon: None,
        }
    }

    pub fn with_rate(kind: BaselineKind, rate: f64) -> Self {
        BaselineSpec {
            kind,
            rate: Some(rate),
            lexicon: None,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.kind.uses_rate() {
            match self.rate {
                None => {
                    return Err(ConfigError::new(format!(
                        "{} requires a rate",
                        self.kind.method()
                    )))
                }
                Some(rate) if !(0.0..=1.0).contains(&rate) => {
                    return Err(ConfigError::new(format!(
                        "rate must lie in [0, 1], got {rate}"
                    )))
                }
                Some(_) => {}
            }
        }
        if self.kind == BaselineKind::SynonymReplacement && self.lexicon.is_none() {
            return Err(ConfigError::new("synonym replacement requires a synonym lexicon"));
        }
        Ok(())
    }

    fn rate(&self) -> f64 {
        self.rate.unwrap_or(0.0)
    }
}

fn word_positions(sentence: &ParsedSentence) -> Vec<usize> {
    sentence
        .tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| !t.is_punct())
        .map(|(i, _)| i)
        .collect()
}

fn remove_positions(sentence: &ParsedSentence, positions: &[usize]) -> ParsedSentence {
    let mut edit = SentenceEdit::new(sentence);
    let mut sorted = positions.to_vec();
    sorted.sort_unstable();
    for &p in sorted.iter().rev() {
        edit.remove(p);
    }
    edit.finish()
}

/// Number of tokens dropped from the end by cropping. The terminal
/// punctuation mark is excluded from the count but goes with the suffix.
pub fn crop_amount(sentence: &ParsedSentence, rate: f64) -> usize {
    let counted = counted_for_crop(sentence);
    if counted == 0 {
        return 0;
    }
    // Guard against products like 0.1 * 30 landing a hair above an integer.
    let k = (rate * counted as f64 - 1e-9).ceil().max(0.0) as usize;
    k.min(counted - 1)
}

fn counted_for_crop(sentence: &ParsedSentence) -> usize {
    let n = sentence.len();
    if sentence.tokens[n - 1].is_punct() {
        n - 1
    } else {
        n
    }
}

fn crop(sentence: &ParsedSentence, rate: f64) -> Option<ParsedSentence> {
    let k = crop_amount(sentence, rate);
    if k == 0 {
        return None;
    }
    let keep = counted_for_crop(sentence) - k;
    let dropped: Vec<usize> = (keep..sentence.len()).collect();
    Some(remove_positions(sentence, &dropped))
}

fn word_deletion<R: Rng + ?Sized>(sentence: &ParsedSentence, rate: f64, rng: &mut R) -> Option<ParsedSentence> {
    let words = word_positions(sentence);
    let mut doomed: Vec<usize> = words.iter().copied().filter(|_| rng.gen_bool(rate)).collect();
    if doomed.is_empty() {
        return None;
    }
    if doomed.len() == words.len() {
        doomed.remove(0);
        if doomed.is_empty() {
            return None;
        }
    }
    Some(remove_positions(sentence, &doomed))
}

fn synonym_replacement<R: Rng + ?Sized>(
    sentence: &ParsedSentence,
    lexicon: &SynonymLexicon,
    rng: &mut R,
) -> Option<ParsedSentence> {
    let candidates: Vec<usize> = word_positions(sentence)
        .into_iter()
        .filter(|&i| lexicon.synonyms(&sentence.tokens[i].form).is_some())
        .collect();
    if candidates.is_empty() {
        return None;
    }
    let target = candidates[rng.gen_range(0..candidates.len())];
    let synonyms = lexicon.synonyms(&sentence.tokens[target].form)?;
    let synonym = &synonyms[rng.gen_range(0..synonyms.len())];
    let mut out = sentence.clone();
    out.raw_text = None;
    out.tokens[target].form = synonym.clone();
    out.tokens[target].lemma = synonym.clone();
    Some(out)
}

fn mask<R: Rng + ?Sized>(sentence: &ParsedSentence, rate: f64, rng: &mut R) -> Option<ParsedSentence> {
    let mut out = sentence.clone();
    out.raw_text = None;
    let mut any = false;
    for i in word_positions(sentence) {
        if rng.gen_bool(rate) {
            out.tokens[i].form = MASK_TOKEN.into();
            out.tokens[i].lemma = MASK_TOKEN.into();
            any = true;
        }
    }
    any.then_some(out)
}

/// Duplicates the word at `offset` in place.
pub fn repeat_word_at(sentence: &ParsedSentence, offset: usize) -> ParsedSentence {
    let token = &sentence.tokens[offset];
    let mut edit = SentenceEdit::new(sentence);
    edit.insert(
        offset + 1,
        NewToken {
            form: &token.form,
            lemma: &token.lemma,
            upos: &token.upos,
            deprel: "dep",
        },
        offset,
    );
    edit.finish()
}

/// Inserts `mark` so that it becomes the token at `position`.
pub fn insert_punct_at(sentence: &ParsedSentence, position: usize, mark: &str) -> ParsedSentence {
    let root = sentence.root().expect("validated sentence has a root");
    let mut edit = SentenceEdit::new(sentence);
    edit.insert(
        position,
        NewToken {
            form: mark,
            lemma: mark,
            upos: "PUNCT",
            deprel: "punct",
        },
        root,
    );
    edit.finish()
}

/// Rewrites `sentence` according to a validated `spec`; `None` means the
/// sentence is left as is.
pub fn apply_baseline_rewrite<R: Rng + ?Sized>(
    sentence: &ParsedSentence,
    spec: &BaselineSpec,
    rng: &mut R,
) -> Option<ParsedSentence> {
    match spec.kind {
        BaselineKind::Crop => crop(sentence, spec.rate()),
        BaselineKind::WordDeletion => word_deletion(sentence, spec.rate(), rng),
        BaselineKind::SynonymReplacement => synonym_replacement(sentence, spec.lexicon.as_ref()?, rng),
        BaselineKind::Mask => mask(sentence, spec.rate(), rng),
        BaselineKind::WordRepetition => {
            let words = word_positions(sentence);
            if words.is_empty() {
                return None;
            }
            Some(repeat_word_at(sentence, words[rng.gen_range(0..words.len())]))
        }
        BaselineKind::RandomPunctInsertion => {
            let n = sentence.len();
            let position = if n > 1 { rng.gen_range(1..n) } else { 1 };
            let mark = PUNCTUATION_POOL[rng.gen_range(0..PUNCTUATION_POOL.len())];
            Some(insert_punct_at(sentence, position, mark))
        }
    }
}

pub fn apply_baseline<R: Rng + ?Sized>(
    sentence: &ParsedSentence,
    spec: &BaselineSpec,
    rng: &mut R,
) -> Result<AugmentedPair, ConfigError> {
    spec.validate()?;
    let rewritten = apply_baseline_rewrite(sentence, spec, rng);
    Ok(lexical_pair(sentence, rewritten.as_ref(), spec.kind.method()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detok::detokenize;
    use crate::rng::sentence_rng;
    use crate::testing::{sentence, shareholder};

    fn dogs() -> ParsedSentence {
        sentence(&[
            ("Dogs", "dog", "NOUN", 2, "nsubj"),
            ("bark", "bark", "VERB", 0, "root"),
            (".", ".", "PUNCT", 2, "punct"),
        ])
    }

    #[test]
    fn validation() {
        assert!(BaselineSpec::new(BaselineKind::Crop).validate().is_err());
        assert!(BaselineSpec::with_rate(BaselineKind::Mask, 1.5).validate().is_err());
        assert!(BaselineSpec::with_rate(BaselineKind::Mask, f64::NAN).validate().is_err());
        assert!(BaselineSpec::new(BaselineKind::SynonymReplacement).validate().is_err());
        assert!(BaselineSpec::new(BaselineKind::WordRepetition).validate().is_ok());
        let err = apply_baseline(&dogs(), &BaselineSpec::new(BaselineKind::Crop), &mut sentence_rng(0, 0));
        assert!(err.is_err());
    }

    #[test]
    fn crop_strikes_the_tail() {
        let s = shareholder();
        let twenty = apply_baseline(&s, &BaselineSpec::with_rate(BaselineKind::Crop, 0.2), &mut sentence_rng(0, 0)).unwrap();
        assert_eq!(
            twenty.positive,
            "A shareholder may transfer its Shares only with the prior written consent"
        );
        let thirty = apply_baseline(&s, &BaselineSpec::with_rate(BaselineKind::Crop, 0.3), &mut sentence_rng(0, 0)).unwrap();
        assert!(twenty.positive.starts_with(&thirty.positive));
        assert!(!thirty.positive.contains("of the Company"));
        assert_eq!(crop_amount(&s, 0.3), 5);
    }

    #[test]
    fn zero_rate_deletion_is_identity() {
        let pair = apply_baseline(&dogs(), &BaselineSpec::with_rate(BaselineKind::WordDeletion, 0.0), &mut sentence_rng(3, 0)).unwrap();
        assert!(!pair.changed);
        assert_eq!(pair.positive, "Dogs bark.");
    }

    #[test]
    fn full_rate_deletion_keeps_a_word() {
        let out = word_deletion(&dogs(), 1.0, &mut sentence_rng(0, 0)).unwrap();
        assert_eq!(detokenize(&out), "Dogs.");
    }

    #[test]
    fn word_repetition() {
        assert_eq!(detokenize(&repeat_word_at(&dogs(), 0)), "Dogs Dogs bark.");
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..64 {
            let spec = BaselineSpec::new(BaselineKind::WordRepetition);
            seen.insert(apply_baseline(&dogs(), &spec, &mut sentence_rng(seed, 0)).unwrap().positive);
        }
        let expected: std::collections::BTreeSet<String> =
            ["Dogs Dogs bark.".to_owned(), "Dogs bark bark.".to_owned()].into();
        assert_eq!(seen, expected);
    }

    #[test]
    fn synonym_replacement_uses_lexicon() {
        let lexicon = SynonymLexicon::parse("dogs\thounds\n").unwrap();
        let spec = BaselineSpec {
            kind: BaselineKind::SynonymReplacement,
            rate: None,
            lexicon: Some(lexicon),
        };
        let pair = apply_baseline(&dogs(), &spec, &mut sentence_rng(0, 0)).unwrap();
        assert_eq!(pair.positive, "hounds bark.");

        let empty = BaselineSpec {
            lexicon: Some(SynonymLexicon::default()),
            ..spec
        };
        assert!(!apply_baseline(&dogs(), &empty, &mut sentence_rng(0, 0)).unwrap().changed);
    }

    #[test]
    fn mask_replaces_words_only() {
        let out = mask(&dogs(), 1.0, &mut sentence_rng(0, 0)).unwrap();
        assert_eq!(detokenize(&out), "[MASK] [MASK].");
    }

    #[test]
    fn random_insertion_adds_one_mark() {
        for seed in 0..50 {
            let out = apply_baseline_rewrite(&dogs(), &BaselineSpec::new(BaselineKind::RandomPunctInsertion), &mut sentence_rng(seed, 0)).unwrap();
            assert_eq!(out.len(), 4);
            let words: Vec<&str> = out.tokens.iter().filter(|t| !t.is_punct()).map(|t| t.form.as_str()).collect();
            assert_eq!(words, vec!["Dogs", "bark"]);
            assert!(out.tokens[0].form == "Dogs");
        }
    }
}
