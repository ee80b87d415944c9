//! Surface realization of token sequences, and a whitespace/punctuation
//! tokenizer for raw STS sentences.

use crate::conllu::ParsedSentence;

const NO_SPACE_BEFORE: &[&str] = &[",", ".", "!", "?", ";", ":", "”", ")", "]", "}", "...", "…"];
const NO_SPACE_AFTER: &[&str] = &["“", "(", "[", "{"];

/// Joins the forms of `sentence` into a single line of text.
pub fn detokenize(sentence: &ParsedSentence) -> String {
    let tokens: Vec<(&str, bool)> = sentence
        .tokens
        .iter()
        .map(|t| (t.form.as_str(), t.space_after))
        .collect();
    join_tokens(&tokens)
}

/// Joins `(form, space_after)` pairs.
///
/// Straight double quotes alternate between opening and closing, so the
/// first `"` attaches to the following token and the second to the
/// preceding one.
pub fn join_tokens(tokens: &[(&str, bool)]) -> String {
    let mut out = String::new();
    let mut quote_open = false;
    let mut glue_next = true;

    for &(form, space_after) in tokens {
        let form = form.trim();
        if form.is_empty() {
            continue;
        }
        let straight_quote = form == "\"";
        let closes_quote = straight_quote && quote_open;
        let attaches_left = NO_SPACE_BEFORE.contains(&form) || closes_quote;

        if !glue_next && !attaches_left {
            out.push(' ');
        }
        out.push_str(form);

        let opens = NO_SPACE_AFTER.contains(&form) || (straight_quote && !quote_open);
        if straight_quote {
            quote_open = !quote_open;
        }
        glue_next = opens || !space_after;
    }

    out
}

fn is_edge_punct(c: char) -> bool {
    c.is_ascii_punctuation() || matches!(c, '“' | '”' | '‘' | '’' | '…')
}

/// Splits raw text on whitespace and peels punctuation off word edges.
///
/// A trailing `n't` is split off its host (`don't` -> `do`, `n't`) when the
/// host has at least two characters.
pub fn tokenize_plain(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let mut start = 0;
        let mut end = chars.len();
        let mut leading = Vec::new();
        while start < end && is_edge_punct(chars[start]) {
            leading.push(chars[start].to_string());
            start += 1;
        }
        let mut trailing = Vec::new();
        while end > start && is_edge_punct(chars[end - 1]) {
            trailing.push(chars[end - 1].to_string());
            end -= 1;
        }
        tokens.extend(leading);
        if start < end {
            let word: String = chars[start..end].iter().collect();
            let lower = word.to_lowercase();
            if lower.ends_with("n't") && word.chars().count() > 4 {
                let cut = word.len() - 3;
                tokens.push(word[..cut].to_owned());
                tokens.push(word[cut..].to_owned());
            } else {
                tokens.push(word);
            }
        }
        tokens.extend(trailing.into_iter().rev());
    }
    tokens
}
