//! Reading and writing dependency-annotated sentences in CoNLL-U.
//!
//! Only syntactic words are modeled. Multiword-token ranges (`3-4`) and
//! empty nodes (`5.1`) are skipped on input, and the `DEPS` and `FEATS`
//! columns are carried through untouched.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConlluError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("sentence {sent_id}: {message}")]
    Structure { sent_id: String, message: String },
}

/// One syntactic word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// 1-based position in the sentence.
    pub index: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: Option<String>,
    pub feats: Option<String>,
    /// 1-based index of the head, 0 for the root.
    pub head: usize,
    pub deprel: String,
    pub deps: Option<String>,
    /// MISC attributes other than `SpaceAfter=No`.
    pub misc: Vec<String>,
    pub space_after: bool,
}

impl Token {
    pub fn new(index: usize, form: &str, lemma: &str, upos: &str, head: usize, deprel: &str) -> Self {
        Token {
            index,
            form: form.to_owned(),
            lemma: lemma.to_owned(),
            upos: upos.to_owned(),
            xpos: None,
            feats: None,
            head,
            deprel: deprel.to_owned(),
            deps: None,
            misc: Vec::new(),
            space_after: true,
        }
    }

    pub fn is_root(&self) -> bool {
        self.head == 0
    }

    pub fn is_punct(&self) -> bool {
        self.upos == "PUNCT"
    }

    /// Lemma, falling back to the lower-cased form when the lemma is absent.
    pub fn base_form(&self) -> String {
        if self.lemma.is_empty() || self.lemma == "_" {
            self.form.to_lowercase()
        } else {
            self.lemma.clone()
        }
    }

    /// Dependency relation without its subtype (`nsubj:pass` -> `nsubj`).
    pub fn universal_deprel(&self) -> &str {
        self.deprel.split(':').next().unwrap_or(&self.deprel)
    }

    pub fn has_deprel(&self, label: &str) -> bool {
        self.deprel.eq_ignore_ascii_case(label)
    }
}

pub fn is_root_label(label: &str) -> bool {
    label.eq_ignore_ascii_case("root")
}

/// Half-open range of 0-based token offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, offset: usize) -> bool {
        self.start <= offset && offset < self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedSentence {
    pub tokens: Vec<Token>,
    pub sent_id: Option<String>,
    pub raw_text: Option<String>,
}

impl ParsedSentence {
    /// Builds a sentence and checks the tree invariants.
    pub fn new(tokens: Vec<Token>) -> Result<Self, ConlluError> {
        let sentence = ParsedSentence {
            tokens,
            sent_id: None,
            raw_text: None,
        };
        sentence.validate()?;
        Ok(sentence)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn forms(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.form.as_str())
    }

    /// 0-based offset of the root token.
    pub fn root(&self) -> Option<usize> {
        self.tokens.iter().position(Token::is_root)
    }

    /// 0-based offset of the head of the token at `offset`, `None` for the root.
    pub fn head_of(&self, offset: usize) -> Option<usize> {
        match self.tokens[offset].head {
            0 => None,
            h => Some(h - 1),
        }
    }

    /// 0-based offsets of the direct dependents of `offset`, in sentence order.
    pub fn children(&self, offset: usize) -> impl Iterator<Item = usize> + '_ {
        let index = offset + 1;
        self.tokens
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.head == index)
            .map(|(i, _)| i)
    }

    fn label(&self) -> String {
        self.sent_id.clone().unwrap_or_else(|| "<unnamed>".to_owned())
    }

    pub fn validate(&self) -> Result<(), ConlluError> {
        let structure = |message: String| ConlluError::Structure {
            sent_id: self.label(),
            message,
        };

        if self.tokens.is_empty() {
            return Err(structure("sentence has no tokens".into()));
        }

        let n = self.tokens.len();
        let mut roots = 0;
        for (offset, token) in self.tokens.iter().enumerate() {
            if token.index != offset + 1 {
                return Err(structure(format!(
                    "token ids must be consecutive from 1, found {} at position {}",
                    token.index,
                    offset + 1
                )));
            }
            if token.head == token.index {
                return Err(structure(format!("token {} is its own head", token.index)));
            }
            if token.head > n {
                return Err(structure(format!(
                    "token {} has head {} outside the sentence",
                    token.index, token.head
                )));
            }
            if token.head == 0 {
                roots += 1;
                if !is_root_label(&token.deprel) {
                    return Err(structure(format!(
                        "token {} has head 0 but relation {}",
                        token.index, token.deprel
                    )));
                }
            } else if is_root_label(&token.deprel) {
                return Err(structure(format!(
                    "token {} is labeled root but has head {}",
                    token.index, token.head
                )));
            }
        }
        if roots != 1 {
            return Err(structure(format!("expected exactly one root, found {roots}")));
        }

        // Every token must reach the root within n steps.
        for start in 0..n {
            let mut current = start;
            let mut steps = 0;
            while let Some(head) = self.head_of(current) {
                current = head;
                steps += 1;
                if steps > n {
                    return Err(structure(format!(
                        "cycle through token {}",
                        self.tokens[start].index
                    )));
                }
            }
        }

        Ok(())
    }
}

/// Row of a hand-built sentence: form, lemma, UPOS, 1-based head, relation.
pub type Row<'a> = (&'a str, &'a str, &'a str, usize, &'a str);

/// Builds and validates a sentence from rows.
pub fn build_sentence(rows: &[Row<'_>]) -> Result<ParsedSentence, ConlluError> {
    let tokens = rows
        .iter()
        .enumerate()
        .map(|(i, &(form, lemma, upos, head, deprel))| Token::new(i + 1, form, lemma, upos, head, deprel))
        .collect();
    ParsedSentence::new(tokens)
}

/// Smallest span covering `offset` and all of its transitive dependents.
///
/// Discontiguous subtrees collapse to their convex hull.
pub fn subtree_span(sentence: &ParsedSentence, offset: usize) -> Span {
    let mut start = offset;
    let mut end = offset + 1;
    let mut stack = vec![offset];
    while let Some(node) = stack.pop() {
        for child in sentence.children(node) {
            start = start.min(child);
            end = end.max(child + 1);
            stack.push(child);
        }
    }
    Span { start, end }
}

const SPACE_AFTER_NO: &str = "SpaceAfter=No";

fn optional(field: &str) -> Option<String> {
    if field == "_" {
        None
    } else {
        Some(field.to_owned())
    }
}

fn parse_token(line: &str, line_no: usize) -> Result<Option<Token>, ConlluError> {
    let err = |message: String| ConlluError::Parse {
        line: line_no,
        message,
    };

    let columns: Vec<&str> = line.split('\t').collect();
    if columns.len() != 10 {
        return Err(err(format!("expected 10 columns, found {}", columns.len())));
    }

    let id = columns[0];
    if id.contains('-') || id.contains('.') {
        return Ok(None);
    }
    let index: usize = id
        .parse()
        .map_err(|_| err(format!("invalid token id {id:?}")))?;
    if index == 0 {
        return Err(err("token id must be at least 1".into()));
    }
    let head: usize = columns[6]
        .parse()
        .map_err(|_| err(format!("invalid head {:?}", columns[6])))?;

    let mut misc = Vec::new();
    let mut space_after = true;
    if columns[9] != "_" {
        for attr in columns[9].split('|') {
            if attr == SPACE_AFTER_NO {
                space_after = false;
            } else {
                misc.push(attr.to_owned());
            }
        }
    }

    Ok(Some(Token {
        index,
        form: columns[1].to_owned(),
        lemma: columns[2].to_owned(),
        upos: columns[3].to_owned(),
        xpos: optional(columns[4]),
        feats: optional(columns[5]),
        head,
        deprel: columns[7].to_owned(),
        deps: optional(columns[8]),
        misc,
        space_after,
    }))
}

#[derive(Default)]
struct Block {
    tokens: Vec<Token>,
    sent_id: Option<String>,
    raw_text: Option<String>,
    seen_line: bool,
}

impl Block {
    fn finish(&mut self, out: &mut Vec<ParsedSentence>) -> Result<(), ConlluError> {
        let block = std::mem::take(self);
        if !block.seen_line {
            return Ok(());
        }
        let sentence = ParsedSentence {
            tokens: block.tokens,
            sent_id: block.sent_id,
            raw_text: block.raw_text,
        };
        sentence.validate()?;
        out.push(sentence);
        Ok(())
    }
}

/// Parses every sentence block in `text`.
pub fn parse_conllu(text: &str) -> Result<Vec<ParsedSentence>, ConlluError> {
    let mut sentences = Vec::new();
    let mut block = Block::default();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            block.finish(&mut sentences)?;
            continue;
        }
        block.seen_line = true;
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim_start();
            if let Some(value) = comment.strip_prefix("sent_id") {
                if let Some(value) = value.trim_start().strip_prefix('=') {
                    block.sent_id = Some(value.trim().to_owned());
                }
            } else if let Some(value) = comment.strip_prefix("text") {
                if let Some(value) = value.trim_start().strip_prefix('=') {
                    block.raw_text = Some(value.trim().to_owned());
                }
            }
            continue;
        }
        if let Some(token) = parse_token(line, line_no)? {
            block.tokens.push(token);
        }
    }
    block.finish(&mut sentences)?;

    Ok(sentences)
}

fn column(value: &Option<String>) -> &str {
    value.as_deref().unwrap_or("_")
}

/// Writes sentences as CoNLL-U, one block per sentence, each followed by a
/// blank line.
pub fn serialize_conllu(sentences: &[ParsedSentence]) -> String {
    let mut out = String::new();
    for sentence in sentences {
        if let Some(id) = &sentence.sent_id {
            let _ = writeln!(out, "# sent_id = {id}");
        }
        if let Some(text) = &sentence.raw_text {
            let _ = writeln!(out, "# text = {text}");
        }
        for token in &sentence.tokens {
            let mut misc = token.misc.clone();
            if !token.space_after {
                misc.push(SPACE_AFTER_NO.to_owned());
            }
            let misc = if misc.is_empty() {
                "_".to_owned()
            } else {
                misc.join("|")
            };
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                token.index,
                token.form,
                token.lemma,
                token.upos,
                column(&token.xpos),
                column(&token.feats),
                token.head,
                token.deprel,
                column(&token.deps),
                misc
            );
        }
        out.push('\n');
    }
    out
}

/// Mutable working copy of a sentence used by the rewriting rules.
///
/// Nodes keep a stable identity while tokens are inserted and removed, and
/// indices and heads are renumbered once in [`SentenceEdit::finish`].
#[derive(Debug, Clone)]
pub(crate) struct SentenceEdit {
    nodes: Vec<Node>,
    next_id: usize,
    sent_id: Option<String>,
}

#[derive(Debug, Clone)]
struct Node {
    id: usize,
    head: Option<usize>,
    token: Token,
}

/// Attributes of a token to be inserted.
pub(crate) struct NewToken<'a> {
    pub form: &'a str,
    pub lemma: &'a str,
    pub upos: &'a str,
    pub deprel: &'a str,
}

impl SentenceEdit {
    /// Node ids of the returned edit equal the original 0-based offsets.
    pub fn new(sentence: &ParsedSentence) -> Self {
        let nodes = sentence
            .tokens
            .iter()
            .enumerate()
            .map(|(offset, token)| Node {
                id: offset,
                head: sentence.head_of(offset),
                token: token.clone(),
            })
            .collect();
        SentenceEdit {
            nodes,
            next_id: sentence.len(),
            sent_id: sentence.sent_id.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn token(&self, position: usize) -> &Token {
        &self.nodes[position].token
    }

    pub fn token_mut(&mut self, position: usize) -> &mut Token {
        &mut self.nodes[position].token
    }

    pub fn id_at(&self, position: usize) -> usize {
        self.nodes[position].id
    }

    pub fn is_root_at(&self, position: usize) -> bool {
        self.nodes[position].head.is_none()
    }

    pub fn position_of(&self, id: usize) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Inserts a token at `position`, attached to node `head`.
    ///
    /// The new token takes over the spacing of the gap it fills.
    pub fn insert(&mut self, position: usize, new: NewToken<'_>, head: usize) -> usize {
        let mut token = Token::new(0, new.form, new.lemma, new.upos, 0, new.deprel);
        if position > 0 {
            let previous = &mut self.nodes[position - 1].token;
            token.space_after = previous.space_after;
            previous.space_after = true;
        }
        let id = self.next_id;
        self.next_id += 1;
        self.nodes.insert(
            position,
            Node {
                id,
                head: Some(head),
                token,
            },
        );
        id
    }

    /// Inserts a copy of the token at `source` immediately after it, as a
    /// `punct` dependent of the source's head.
    pub fn duplicate(&mut self, source: usize) -> usize {
        let original = self.nodes[source].token.clone();
        let head = self.nodes[source].head.unwrap_or(self.nodes[source].id);
        let id = self.insert(
            source + 1,
            NewToken {
                form: &original.form,
                lemma: &original.lemma,
                upos: &original.upos,
                deprel: "punct",
            },
            head,
        );
        let copy = &mut self.nodes[source + 1].token;
        copy.xpos = original.xpos;
        copy.feats = original.feats;
        id
    }

    /// Removes the token at `position`, reattaching its dependents to its
    /// head. Removing the root promotes its first dependent. Returns false
    /// when the token is the only one left.
    pub fn remove(&mut self, position: usize) -> bool {
        if self.nodes.len() <= 1 {
            return false;
        }
        let removed = self.nodes.remove(position);
        if position > 0 {
            self.nodes[position - 1].token.space_after = removed.token.space_after;
        }
        match removed.head {
            Some(head) => {
                for node in self.nodes.iter_mut().filter(|n| n.head == Some(removed.id)) {
                    node.head = Some(head);
                }
            }
            None => {
                let Some(new_root) = self
                    .nodes
                    .iter()
                    .position(|n| n.head == Some(removed.id))
                else {
                    return true;
                };
                let new_root_id = self.nodes[new_root].id;
                for node in self.nodes.iter_mut() {
                    if node.id == new_root_id {
                        node.head = None;
                        node.token.deprel = removed.token.deprel.clone();
                    } else if node.head == Some(removed.id) {
                        node.head = Some(new_root_id);
                    }
                }
            }
        }
        true
    }

    pub fn finish(self) -> ParsedSentence {
        let positions: std::collections::HashMap<usize, usize> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(position, node)| (node.id, position + 1))
            .collect();
        let tokens = self
            .nodes
            .into_iter()
            .enumerate()
            .map(|(position, node)| {
                let mut token = node.token;
                token.index = position + 1;
                token.head = node.head.map_or(0, |h| positions[&h]);
                token
            })
            .collect();
        let sentence = ParsedSentence {
            tokens,
            sent_id: self.sent_id,
            raw_text: None,
        };
        debug_assert!(sentence.validate().is_ok(), "{:?}", sentence.validate());
        sentence
    }
}
