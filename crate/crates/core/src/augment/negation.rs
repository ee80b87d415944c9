//! Double negation.
//!
//! Two negation edits are applied to a sentence: removing an existing
//! negative word, or inserting "not" after an auxiliary, "do not" before a
//! bare root verb, or "Not" at the start of the sentence. A sentence that
//! offers fewer than two edit sites is left unchanged.

use super::lexicon::NegLexicon;
use super::{lexical_pair, restore_initial_case, AugmentedPair, Method};
use crate::conllu::{NewToken, ParsedSentence, SentenceEdit};

/// Number of negation edits a rewrite must make.
pub const REQUIRED_EDITS: usize = 2;

fn particle(form: &str) -> NewToken<'_> {
    NewToken {
        form,
        lemma: "not",
        upos: "PART",
        deprel: "advmod",
    }
}

/// Applies two negation edits, or returns `None` when fewer than two sites
/// exist.
pub fn rewrite_double_negation(sentence: &ParsedSentence, lexicon: &NegLexicon) -> Option<ParsedSentence> {
    let mut edit = SentenceEdit::new(sentence);
    let mut count = 0;

    if let Some(position) = sentence.tokens.iter().position(|t| lexicon.contains(&t.form)) {
        if edit.remove(position) {
            count += 1;
        }
    }

    let order: Vec<usize> = (0..edit.len()).map(|p| edit.id_at(p)).collect();
    let mut negated_aux = false;

    for id in order {
        if count == REQUIRED_EDITS {
            break;
        }
        let position = edit.position_of(id).expect("scanned node is present");
        let token = edit.token(position);

        if token.has_deprel("aux") {
            edit.insert(position + 1, particle("not"), id);
            negated_aux = true;
            count += 1;
        } else if edit.is_root_at(position) {
            if token.upos == "VERB" && !negated_aux {
                let lemma = token.base_form();
                let verb = edit.token_mut(position);
                verb.form = lemma.clone();
                verb.lemma = lemma;
                verb.feats = None;
                edit.insert(position, particle("not"), id);
                edit.insert(
                    position,
                    NewToken {
                        form: "do",
                        lemma: "do",
                        upos: "AUX",
                        deprel: "aux",
                    },
                    id,
                );
            } else {
                edit.insert(0, particle("Not"), id);
            }
            count += 1;
        }
    }

    if count < REQUIRED_EDITS {
        return None;
    }
    restore_initial_case(sentence, &mut edit);
    Some(edit.finish())
}

pub fn double_negation(sentence: &ParsedSentence, lexicon: &NegLexicon) -> AugmentedPair {
    let rewritten = rewrite_double_negation(sentence, lexicon);
    lexical_pair(sentence, rewritten.as_ref(), Method::Dn)
}
