//! Word lists used by the rewriting rules.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct LexiconError {
    pub line: usize,
    pub message: String,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxEntry {
    /// Form used with plural and first/second person subjects, e.g. "have to".
    pub base: String,
    /// Form used with third-person singular subjects, e.g. "has to".
    pub third_singular: String,
}

impl AuxEntry {
    pub fn new(base: &str, third_singular: &str) -> Self {
        AuxEntry {
            base: base.to_owned(),
            third_singular: third_singular.to_owned(),
        }
    }
}

/// Affirmative auxiliary phrases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxLexicon {
    entries: Vec<AuxEntry>,
}

impl AuxLexicon {
    pub fn new(entries: Vec<AuxEntry>) -> Result<Self, LexiconError> {
        if entries.is_empty() {
            return Err(LexiconError {
                line: 0,
                message: "auxiliary lexicon is empty".into(),
            });
        }
        if let Some(bad) = entries
            .iter()
            .position(|e| e.base.trim().is_empty() || e.third_singular.trim().is_empty())
        {
            return Err(LexiconError {
                line: bad + 1,
                message: "entry lacks a base or third-person form".into(),
            });
        }
        Ok(AuxLexicon { entries })
    }

    /// Parses `base<TAB>third-person-singular` lines.
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut entries = Vec::new();
        for (line, content) in content_lines(text) {
            let fields: Vec<&str> = content.split('\t').collect();
            match fields.as_slice() {
                [base, third] if !base.trim().is_empty() && !third.trim().is_empty() => {
                    entries.push(AuxEntry::new(base.trim(), third.trim()))
                }
                _ => {
                    return Err(LexiconError {
                        line,
                        message: "expected `base<TAB>third-person-singular`".into(),
                    })
                }
            }
        }
        Self::new(entries)
    }

    pub fn entries(&self) -> &[AuxEntry] {
        &self.entries
    }

    pub fn find(&self, base: &str) -> Option<&AuxEntry> {
        self.entries.iter().find(|e| e.base == base)
    }
}

impl Default for AuxLexicon {
    fn default() -> Self {
        AuxLexicon {
            entries: vec![
                AuxEntry::new("have to", "has to"),
                AuxEntry::new("can't but", "can't but"),
                AuxEntry::new("can't help to", "can't help to"),
            ],
        }
    }
}

/// Negative words, stored lower-cased.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegLexicon {
    entries: BTreeSet<String>,
}

impl NegLexicon {
    pub fn new<I, S>(words: I) -> Result<Self, LexiconError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let entries: BTreeSet<String> = words
            .into_iter()
            .map(|w| w.as_ref().trim().to_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        if entries.is_empty() {
            return Err(LexiconError {
                line: 0,
                message: "negation lexicon is empty".into(),
            });
        }
        Ok(NegLexicon { entries })
    }

    /// One word per line.
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut words = Vec::new();
        for (line, content) in content_lines(text) {
            let word = content.trim();
            if word.contains(char::is_whitespace) {
                return Err(LexiconError {
                    line,
                    message: format!("negative word {word:?} contains whitespace"),
                });
            }
            words.push(word.to_owned());
        }
        Self::new(words)
    }

    pub fn contains(&self, form: &str) -> bool {
        self.entries.contains(&form.to_lowercase())
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(String::as_str)
    }
}

impl Default for NegLexicon {
    fn default() -> Self {
        NegLexicon::new(["not", "n't", "no", "never"]).expect("non-empty")
    }
}

/// Word to synonym list table.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SynonymLexicon {
    entries: BTreeMap<String, Vec<String>>,
}

impl SynonymLexicon {
    pub fn new(entries: BTreeMap<String, Vec<String>>) -> Self {
        let entries = entries
            .into_iter()
            .map(|(k, v)| (k.to_lowercase(), v))
            .filter(|(_, v)| !v.is_empty())
            .collect();
        SynonymLexicon { entries }
    }

    /// Parses `word<TAB>syn1,syn2,...` lines.
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut entries: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (line, content) in content_lines(text) {
            let Some((word, synonyms)) = content.split_once('\t') else {
                return Err(LexiconError {
                    line,
                    message: "expected `word<TAB>synonym,synonym,...`".into(),
                });
            };
            let synonyms: Vec<String> = synonyms
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_owned)
                .collect();
            if word.trim().is_empty() || synonyms.is_empty() {
                return Err(LexiconError {
                    line,
                    message: "entry needs a word and at least one synonym".into(),
                });
            }
            entries
                .entry(word.trim().to_lowercase())
                .or_default()
                .extend(synonyms);
        }
        Ok(SynonymLexicon { entries })
    }

    pub fn synonyms(&self, form: &str) -> Option<&[String]> {
        self.entries.get(&form.to_lowercase()).map(Vec::as_slice)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
