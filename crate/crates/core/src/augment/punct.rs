//! Punctuation insertion.
//!
//! Four rules, tried in this order under [`RuleStrategy::Cascade`]:
//!
//! 1. a comma at the boundary of a subordinate clause,
//! 2. a comma after, or quotes around, a nominal subject,
//! 3. a copy of an interior punctuation mark,
//! 4. an exclamation mark at the end of the sentence.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{lexical_pair, AugmentedPair, Method};
use crate::conllu::{subtree_span, NewToken, ParsedSentence, SentenceEdit, Span};

pub(crate) const CLAUSE_RELATIONS: &[&str] = &["advcl", "ccomp", "acl", "acl:relcl", "csubj"];
pub(crate) const SUBJECT_RELATIONS: &[&str] = &["nsubj", "nsubj:pass"];

const OPENING_QUOTE: &str = "“";
const CLOSING_QUOTE: &str = "”";
const CLOSERS: &[&str] = &["”", "\"", "'", "’", ")", "]", "}"];

/// How one rule is picked among the applicable ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleStrategy {
    /// First applicable rule in order.
    #[default]
    Cascade,
    /// Uniform choice among the applicable rules.
    UniformRandom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubjectMark {
    Comma,
    Quotes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PiRule {
    SubordinateClause,
    NounSubject(SubjectMark),
    InteriorPunct,
    Terminal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Site {
    /// Insert a comma before `position`, attached to `head`.
    Clause { position: usize, head: usize },
    Subject { subject: usize, span: Span },
    Interior(usize),
    Terminal,
}

fn clause_site(sentence: &ParsedSentence) -> Option<Site> {
    let n = sentence.len();
    sentence
        .tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| CLAUSE_RELATIONS.iter().any(|r| t.has_deprel(r)))
        .find_map(|(offset, _)| {
            let span = subtree_span(sentence, offset);
            // A clause opening the sentence is closed off at its right edge.
            let position = if span.start > 0 { span.start } else { span.end };
            if position == 0 || position >= n {
                return None;
            }
            let before = &sentence.tokens[position - 1];
            let after = &sentence.tokens[position];
            if before.is_punct() || after.form == "," {
                return None;
            }
            Some(Site::Clause {
                position,
                head: offset,
            })
        })
}

fn subject_site(sentence: &ParsedSentence) -> Option<Site> {
    sentence
        .tokens
        .iter()
        .position(|t| {
            SUBJECT_RELATIONS.iter().any(|r| t.has_deprel(r))
                && (t.upos == "NOUN" || t.upos == "PROPN")
        })
        .map(|subject| Site::Subject {
            subject,
            span: subtree_span(sentence, subject),
        })
}

fn interior_site(sentence: &ParsedSentence) -> Option<Site> {
    let last = sentence.len() - 1;
    sentence
        .tokens
        .iter()
        .take(last)
        .position(|t| t.is_punct())
        .map(Site::Interior)
}

fn sites(sentence: &ParsedSentence) -> Vec<Site> {
    [
        clause_site(sentence),
        subject_site(sentence),
        interior_site(sentence),
        Some(Site::Terminal),
    ]
    .into_iter()
    .flatten()
    .collect()
}

fn punct<'a>(form: &'a str) -> NewToken<'a> {
    NewToken {
        form,
        lemma: form,
        upos: "PUNCT",
        deprel: "punct",
    }
}

fn apply_site(sentence: &ParsedSentence, site: Site, mark: SubjectMark) -> ParsedSentence {
    let mut edit = SentenceEdit::new(sentence);
    match site {
        Site::Clause { position, head } => {
            edit.insert(position, punct(","), head);
        }
        Site::Subject { subject, span } => match mark {
            SubjectMark::Comma => {
                edit.insert(span.end, punct(","), subject);
            }
            SubjectMark::Quotes => {
                edit.insert(span.end, punct(CLOSING_QUOTE), subject);
                edit.insert(span.start, punct(OPENING_QUOTE), subject);
            }
        },
        Site::Interior(offset) => {
            edit.duplicate(offset);
        }
        Site::Terminal => {
            let last = edit.len() - 1;
            let root = sentence.root().expect("validated sentence has a root");
            let final_token = edit.token(last);
            if final_token.form == "!" || !final_token.is_punct() || CLOSERS.contains(&final_token.form.as_str()) {
                edit.insert(last + 1, punct("!"), root);
            } else {
                let token = edit.token_mut(last);
                token.form = "!".into();
                token.lemma = "!".into();
            }
        }
    }
    edit.finish()
}

fn rule_of(site: Site, mark: SubjectMark) -> PiRule {
    match site {
        Site::Clause { .. } => PiRule::SubordinateClause,
        Site::Subject { .. } => PiRule::NounSubject(mark),
        Site::Interior(_) => PiRule::InteriorPunct,
        Site::Terminal => PiRule::Terminal,
    }
}

/// Rules that can fire on `sentence`, in cascade order. The terminal rule
/// always can.
pub fn applicable_rules(sentence: &ParsedSentence) -> Vec<PiRule> {
    sites(sentence)
        .into_iter()
        .map(|s| rule_of(s, SubjectMark::Comma))
        .collect()
}

/// Applies one specific rule, or returns `None` if it does not apply.
pub fn apply_pi_rule(sentence: &ParsedSentence, rule: PiRule) -> Option<ParsedSentence> {
    let (site, mark) = match rule {
        PiRule::SubordinateClause => (clause_site(sentence)?, SubjectMark::Comma),
        PiRule::NounSubject(mark) => (subject_site(sentence)?, mark),
        PiRule::InteriorPunct => (interior_site(sentence)?, SubjectMark::Comma),
        PiRule::Terminal => (Site::Terminal, SubjectMark::Comma),
    };
    Some(apply_site(sentence, site, mark))
}

/// Picks a rule with `strategy` and applies it. Returns the rewritten
/// sentence and the rule that fired.
pub fn rewrite_punctuation<R: Rng + ?Sized>(
    sentence: &ParsedSentence,
    rng: &mut R,
    strategy: RuleStrategy,
) -> (ParsedSentence, PiRule) {
    let candidates = sites(sentence);
    let site = match strategy {
        RuleStrategy::Cascade => candidates[0],
        RuleStrategy::UniformRandom => candidates[rng.gen_range(0..candidates.len())],
    };
    let mark = match site {
        Site::Subject { .. } if rng.gen_bool(0.5) => SubjectMark::Quotes,
        _ => SubjectMark::Comma,
    };
    (apply_site(sentence, site, mark), rule_of(site, mark))
}

pub fn punctuation_insertion<R: Rng + ?Sized>(
    sentence: &ParsedSentence,
    rng: &mut R,
    strategy: RuleStrategy,
) -> AugmentedPair {
    let (rewritten, _) = rewrite_punctuation(sentence, rng, strategy);
    lexical_pair(sentence, Some(&rewritten), Method::Pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detok::detokenize;
    use crate::rng::sentence_rng;
    use crate::testing::sentence;

    #[test]
    fn pronoun_subject_falls_through_to_terminal() {
        let s = sentence(&[
            ("It", "it", "PRON", 2, "nsubj"),
            ("works", "work", "VERB", 0, "root"),
            (".", ".", "PUNCT", 2, "punct"),
        ]);
        assert_eq!(applicable_rules(&s), vec![PiRule::Terminal]);
        let pair = punctuation_insertion(&s, &mut sentence_rng(0, 0), RuleStrategy::Cascade);
        assert_eq!(pair.positive, "It works!");
        assert!(pair.changed);
    }

    #[test]
    fn interior_punct_is_duplicated() {
        let s = sentence(&[
            ("Yes", "yes", "INTJ", 5, "discourse"),
            (",", ",", "PUNCT", 1, "punct"),
            ("it", "it", "PRON", 5, "nsubj"),
            ("is", "be", "AUX", 5, "cop"),
            ("true", "true", "ADJ", 0, "root"),
            (".", ".", "PUNCT", 5, "punct"),
        ]);
        let out = apply_pi_rule(&s, PiRule::InteriorPunct).unwrap();
        assert_eq!(detokenize(&out), "Yes,, it is true.");
        let pair = punctuation_insertion(&s, &mut sentence_rng(0, 0), RuleStrategy::Cascade);
        assert_eq!(pair.positive, "Yes,, it is true.");
    }

    #[test]
    fn terminal_variants() {
        let bang = sentence(&[("Go", "go", "VERB", 0, "root"), ("!", "!", "PUNCT", 1, "punct")]);
        let out = apply_pi_rule(&bang, PiRule::Terminal).unwrap();
        assert_eq!(detokenize(&out), "Go!!");

        let bare = sentence(&[("Go", "go", "VERB", 0, "root"), ("home", "home", "ADV", 1, "advmod")]);
        let out = apply_pi_rule(&bare, PiRule::Terminal).unwrap();
        assert_eq!(detokenize(&out), "Go home!");

        let question = sentence(&[("Why", "why", "ADV", 0, "root"), ("?", "?", "PUNCT", 1, "punct")]);
        let out = apply_pi_rule(&question, PiRule::Terminal).unwrap();
        assert_eq!(detokenize(&out), "Why!");

        let quoted = sentence(&[
            ("“", "“", "PUNCT", 2, "punct"),
            ("Go", "go", "VERB", 0, "root"),
            ("”", "”", "PUNCT", 2, "punct"),
        ]);
        let out = apply_pi_rule(&quoted, PiRule::Terminal).unwrap();
        assert_eq!(detokenize(&out), "“Go”!");
    }

    fn clause_sentence() -> ParsedSentence {
        // We left because it rained .
        sentence(&[
            ("We", "we", "PRON", 2, "nsubj"),
            ("left", "leave", "VERB", 0, "root"),
            ("because", "because", "SCONJ", 5, "mark"),
            ("it", "it", "PRON", 5, "nsubj"),
            ("rained", "rain", "VERB", 2, "advcl"),
            (".", ".", "PUNCT", 2, "punct"),
        ])
    }

    #[test]
    fn comma_before_subordinate_clause() {
        let out = apply_pi_rule(&clause_sentence(), PiRule::SubordinateClause).unwrap();
        assert_eq!(detokenize(&out), "We left, because it rained.");
        out.validate().unwrap();
    }

    #[test]
    fn leading_clause_gets_comma_after_it() {
        // When it rained we left .
        let s = sentence(&[
            ("When", "when", "SCONJ", 3, "mark"),
            ("it", "it", "PRON", 3, "nsubj"),
            ("rained", "rain", "VERB", 5, "advcl"),
            ("we", "we", "PRON", 5, "nsubj"),
            ("left", "leave", "VERB", 0, "root"),
            (".", ".", "PUNCT", 5, "punct"),
        ]);
        let out = apply_pi_rule(&s, PiRule::SubordinateClause).unwrap();
        assert_eq!(detokenize(&out), "When it rained, we left.");
    }

    #[test]
    fn existing_comma_blocks_clause_rule() {
        let s = sentence(&[
            ("We", "we", "PRON", 2, "nsubj"),
            ("left", "leave", "VERB", 0, "root"),
            (",", ",", "PUNCT", 6, "punct"),
            ("because", "because", "SCONJ", 6, "mark"),
            ("it", "it", "PRON", 6, "nsubj"),
            ("rained", "rain", "VERB", 2, "advcl"),
        ]);
        assert!(apply_pi_rule(&s, PiRule::SubordinateClause).is_none());
        assert_eq!(applicable_rules(&s), vec![PiRule::InteriorPunct, PiRule::Terminal]);
    }

    #[test]
    fn subject_quotes() {
        let s = sentence(&[
            ("The", "the", "DET", 2, "det"),
            ("dog", "dog", "NOUN", 3, "nsubj"),
            ("barks", "bark", "VERB", 0, "root"),
            (".", ".", "PUNCT", 3, "punct"),
        ]);
        let quoted = apply_pi_rule(&s, PiRule::NounSubject(SubjectMark::Quotes)).unwrap();
        assert_eq!(detokenize(&quoted), "“The dog” barks.");
        let comma = apply_pi_rule(&s, PiRule::NounSubject(SubjectMark::Comma)).unwrap();
        assert_eq!(detokenize(&comma), "The dog, barks.");
    }

    #[test]
    fn uniform_strategy_reaches_every_applicable_rule() {
        let s = clause_sentence();
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..200 {
            let (_, rule) = rewrite_punctuation(&s, &mut sentence_rng(seed, 0), RuleStrategy::UniformRandom);
            seen.insert(format!("{rule:?}"));
        }
        assert_eq!(seen.len(), 2, "{seen:?}");
    }
}
