//! Affirmative auxiliary insertion.
//!
//! The first be-verb, or the root verb of the main clause, is rewritten as
//! an affirmative auxiliary phrase followed by its base form: "is" becomes
//! "has to be", "may transfer" becomes "has to transfer".

use rand::Rng;

use super::lexicon::{AuxEntry, AuxLexicon};
use super::punct::SUBJECT_RELATIONS;
use super::{lexical_pair, restore_initial_case, AugmentedPair, Method};
use crate::conllu::{NewToken, ParsedSentence, SentenceEdit, Token};

const MODALS: &[&str] = &[
    "may", "might", "can", "could", "must", "shall", "should", "will", "would",
];
const THIRD_SINGULAR_PRONOUNS: &[&str] = &["he", "she", "it"];

fn is_be_verb(token: &Token) -> bool {
    token.base_form().eq_ignore_ascii_case("be") && (token.upos == "AUX" || token.upos == "VERB")
}

fn is_modal(token: &Token) -> bool {
    token.has_deprel("aux") && MODALS.contains(&token.base_form().to_lowercase().as_str())
}

fn is_plural_nominal(token: &Token) -> bool {
    if let Some(feats) = &token.feats {
        if feats.split('|').any(|f| f == "Number=Plur") {
            return true;
        }
        if feats.split('|').any(|f| f == "Number=Sing") {
            return false;
        }
    }
    if let Some(xpos) = &token.xpos {
        return xpos == "NNS" || xpos == "NNPS";
    }
    let form = token.form.to_lowercase();
    form.ends_with('s') && form != token.base_form().to_lowercase()
}

/// Whether `token` takes third-person singular agreement.
fn is_third_singular(token: &Token) -> bool {
    match token.upos.as_str() {
        "PRON" => THIRD_SINGULAR_PRONOUNS.contains(&token.form.to_lowercase().as_str()),
        "NOUN" | "PROPN" => !is_plural_nominal(token),
        _ => false,
    }
}

fn subject_of(sentence: &ParsedSentence, offset: usize) -> Option<usize> {
    let find = |head: usize| {
        sentence
            .children(head)
            .find(|&c| SUBJECT_RELATIONS.iter().any(|r| sentence.tokens[c].has_deprel(r)))
    };
    // A copula or auxiliary shares the subject of the predicate it hangs off.
    find(offset).or_else(|| sentence.head_of(offset).and_then(find))
}

enum Target {
    Be(usize),
    Root(usize),
}

fn find_target(sentence: &ParsedSentence) -> Option<Target> {
    sentence.tokens.iter().enumerate().find_map(|(i, t)| {
        if is_be_verb(t) {
            Some(Target::Be(i))
        } else if t.is_root() && t.upos == "VERB" {
            Some(Target::Root(i))
        } else {
            None
        }
    })
}

fn phrase_lemmas<'a>(entry: &'a AuxEntry, words: &[&'a str]) -> Vec<&'a str> {
    let base: Vec<&str> = entry.base.split_whitespace().collect();
    if base.len() == words.len() {
        base
    } else {
        words.to_vec()
    }
}

/// Rewrites `sentence` with the auxiliary `entry`, or returns `None` when
/// there is no be-verb or verbal root.
pub fn rewrite_affirmative(sentence: &ParsedSentence, entry: &AuxEntry) -> Option<ParsedSentence> {
    let (offset, base) = match find_target(sentence)? {
        Target::Be(i) => (i, "be".to_owned()),
        Target::Root(i) => (i, sentence.tokens[i].base_form()),
    };

    let modal = match find_target(sentence)? {
        Target::Root(i) => sentence.children(i).find(|&c| is_modal(&sentence.tokens[c])),
        Target::Be(_) => None,
    };

    let third = subject_of(sentence, offset)
        .map(|s| is_third_singular(&sentence.tokens[s]))
        .unwrap_or(false);
    let phrase = if third { &entry.third_singular } else { &entry.base };
    let words: Vec<&str> = phrase.split_whitespace().collect();
    let lemmas = phrase_lemmas(entry, &words);

    let mut edit = SentenceEdit::new(sentence);
    let target_id = edit.id_at(offset);
    {
        let token = edit.token_mut(offset);
        token.form = base.clone();
        token.lemma = base;
        token.feats = None;
        if token.xpos.is_some() {
            token.xpos = Some("VB".into());
        }
    }
    if let Some(modal) = modal {
        let position = edit.position_of(modal).expect("modal is in the sentence");
        edit.remove(position);
    }
    let position = edit.position_of(target_id).expect("target is in the sentence");
    for (k, (word, lemma)) in words.iter().zip(&lemmas).enumerate() {
        let (upos, deprel) = if *word == "to" { ("PART", "mark") } else { ("AUX", "aux") };
        edit.insert(
            position + k,
            NewToken {
                form: word,
                lemma,
                upos,
                deprel,
            },
            target_id,
        );
    }
    restore_initial_case(sentence, &mut edit);
    Some(edit.finish())
}

pub fn affirmative_auxiliary<R: Rng + ?Sized>(
    sentence: &ParsedSentence,
    rng: &mut R,
    lexicon: &AuxLexicon,
) -> AugmentedPair {
    let entries = lexicon.entries();
    let entry = &entries[rng.gen_range(0..entries.len())];
    let rewritten = rewrite_affirmative(sentence, entry);
    lexical_pair(sentence, rewritten.as_ref(), Method::Aa)
}
