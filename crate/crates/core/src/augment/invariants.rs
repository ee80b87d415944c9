//! Checks that a rewrite stays within what its method is allowed to change.
//!
//! Each check compares the original and rewritten token forms and returns a
//! description of the first violation. Case is ignored where a method moves
//! sentence-initial capitalization.

use std::collections::{BTreeMap, BTreeSet};

use super::lexicon::{AuxLexicon, NegLexicon};
use super::AugmentedPair;
use crate::conllu::ParsedSentence;

type Check = Result<(), String>;

fn lower_forms(s: &ParsedSentence) -> Vec<String> {
    s.tokens.iter().map(|t| t.form.to_lowercase()).collect()
}

/// `changed` holds exactly when the strings differ.
pub fn check_changed_flag(pair: &AugmentedPair) -> Check {
    if pair.changed != (pair.anchor != pair.positive) {
        return Err(format!("changed={} but anchor {:?} / positive {:?}", pair.changed, pair.anchor, pair.positive));
    }
    if !pair.anchor.is_empty() && pair.positive.is_empty() {
        return Err("empty positive".into());
    }
    Ok(())
}

fn punct_multiset(s: &ParsedSentence) -> BTreeMap<&str, i64> {
    let mut m = BTreeMap::new();
    for t in s.tokens.iter().filter(|t| t.is_punct()) {
        *m.entry(t.form.as_str()).or_insert(0) += 1;
    }
    m
}

/// Punctuation insertion: words untouched, punctuation changed by one
/// insertion, one terminal replacement or one quote pair.
pub fn check_pi(original: &ParsedSentence, rewritten: &ParsedSentence) -> Check {
    let words = |s: &ParsedSentence| -> Vec<String> {
        s.tokens.iter().filter(|t| !t.is_punct()).map(|t| t.form.clone()).collect()
    };
    if words(original) != words(rewritten) {
        return Err("non-punctuation tokens changed".into());
    }
    let (before, after) = (punct_multiset(original), punct_multiset(rewritten));
    let keys: BTreeSet<&str> = before.keys().chain(after.keys()).copied().collect();
    let mut added = Vec::new();
    let mut removed = Vec::new();
    for key in keys {
        let d = after.get(key).copied().unwrap_or(0) - before.get(key).copied().unwrap_or(0);
        for _ in 0..d.max(0) {
            added.push(key);
        }
        for _ in 0..(-d).max(0) {
            removed.push(key);
        }
    }
    let ok = match (added.as_slice(), removed.as_slice()) {
        ([], []) | ([_], []) | (["“", "”"], []) => true,
        (["!"], [r]) => *r != "!",
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(format!("punctuation added {added:?}, removed {removed:?}"))
    }
}

/// Affirmative auxiliary: one verb replaced by a lexicon phrase plus a
/// lemma, optionally with one earlier modal deleted.
pub fn check_aa(original: &ParsedSentence, rewritten: &ParsedSentence, lexicon: &AuxLexicon) -> Check {
    let input = lower_forms(original);
    let output = lower_forms(rewritten);
    if input == output {
        return Ok(());
    }
    let phrases: Vec<Vec<String>> = lexicon
        .entries()
        .iter()
        .flat_map(|e| [&e.base, &e.third_singular])
        .map(|p| p.to_lowercase().split_whitespace().map(str::to_owned).collect())
        .collect();
    for target in 0..input.len() {
        let lemma = original.tokens[target].base_form();
        let lemmas = [lemma.to_lowercase(), "be".to_owned()];
        for modal in std::iter::once(None).chain((0..target).map(Some)) {
            for phrase in &phrases {
                for lemma in &lemmas {
                    let mut expected = Vec::with_capacity(output.len());
                    for (i, w) in input.iter().enumerate() {
                        if Some(i) == modal {
                            continue;
                        }
                        if i == target {
                            expected.extend(phrase.iter().cloned());
                            expected.push(lemma.clone());
                        } else {
                            expected.push(w.clone());
                        }
                    }
                    if expected == output {
                        return Ok(());
                    }
                }
            }
        }
    }
    Err(format!("{input:?} -> {output:?} is not a single predicate edit"))
}

/// Minimum number of negation edits turning `input` into `output`, or
/// `None` when no sequence of negation edits does. Edits are: delete a
/// lexicon negative, insert "not", or insert "do not" while reducing the
/// following verb to its lemma.
fn negation_edits(original: &ParsedSentence, output: &[String], lexicon: &NegLexicon) -> Option<usize> {
    let input = lower_forms(original);
    let (n, m) = (input.len(), output.len());
    const INF: usize = usize::MAX / 2;
    let mut cost = vec![vec![INF; m + 1]; n + 1];
    cost[n][m] = 0;
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            if i == n && j == m {
                continue;
            }
            let mut best = INF;
            if i < n && j < m && input[i] == output[j] {
                best = best.min(cost[i + 1][j + 1]);
            }
            if i < n && lexicon.contains(&input[i]) {
                best = best.min(cost[i + 1][j] + 1);
            }
            if j < m && output[j] == "not" {
                best = best.min(cost[i][j + 1] + 1);
            }
            if i < n
                && j + 2 < m
                && output[j] == "do"
                && output[j + 1] == "not"
                && output[j + 2] == original.tokens[i].base_form().to_lowercase()
            {
                best = best.min(cost[i + 1][j + 3] + 1);
            }
            cost[i][j] = best;
        }
    }
    (cost[0][0] < INF).then_some(cost[0][0])
}

/// Double negation: unchanged, or exactly two negation edits.
pub fn check_dn(original: &ParsedSentence, rewritten: &ParsedSentence, lexicon: &NegLexicon) -> Check {
    let output = lower_forms(rewritten);
    if output == lower_forms(original) {
        return Ok(());
    }
    match negation_edits(original, &output, lexicon) {
        Some(2) => Ok(()),
        other => Err(format!("expected 2 negation edits, found {other:?}")),
    }
}
