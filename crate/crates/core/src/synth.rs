//! Template-generated sentences with hand-assigned UD parses.
//!
//! The templates cover the constructions the augmenters key on: noun,
//! proper-noun and pronoun subjects, modals, copulas, negatives, adverbial
//! and complement clauses, relative clauses, interjections and verbless
//! fragments, with varied terminal punctuation.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::conllu::{ParsedSentence, Token};
use crate::rng::{stream_rng, SeededRng};

const NOUNS: &[(&str, &str)] = &[
    ("dog", "dogs"),
    ("cat", "cats"),
    ("teacher", "teachers"),
    ("farmer", "farmers"),
    ("student", "students"),
    ("company", "companies"),
    ("bird", "birds"),
    ("driver", "drivers"),
];
const OBJECTS: &[&str] = &["book", "door", "letter", "house", "car", "garden", "song", "report"];
const NAMES: &[&str] = &["Alice", "Bob", "Maria", "Omar"];
/// Pronoun, third-person singular, first-person singular.
const PRONOUNS: &[(&str, bool, bool)] = &[
    ("he", true, false),
    ("she", true, false),
    ("it", true, false),
    ("they", false, false),
    ("we", false, false),
    ("I", false, true),
];
/// Lemma, third-person singular, past.
const VERBS: &[(&str, &str, &str)] = &[
    ("open", "opens", "opened"),
    ("read", "reads", "read"),
    ("sell", "sells", "sold"),
    ("watch", "watches", "watched"),
    ("like", "likes", "liked"),
    ("visit", "visits", "visited"),
    ("paint", "paints", "painted"),
    ("build", "builds", "built"),
];
const ADJECTIVES: &[&str] = &["happy", "tired", "ready", "busy", "quiet", "late", "careful"];
const MODALS: &[&str] = &["can", "will", "may", "should", "must", "could"];
const DETERMINERS: &[&str] = &["the", "a", "this", "my"];
const SUBORDINATORS: &[&str] = &["because", "when", "although", "if"];

#[derive(Clone, Copy)]
struct Agreement {
    third_singular: bool,
    first_singular: bool,
}

struct Builder {
    tokens: Vec<Token>,
}

impl Builder {
    fn new() -> Self {
        Builder { tokens: Vec::new() }
    }

    /// Adds a token attached to `head` (1-based, may be fixed up later by
    /// `attach`) and returns its id.
    fn push(&mut self, form: &str, lemma: &str, upos: &str, xpos: &str, deprel: &str) -> usize {
        let id = self.tokens.len() + 1;
        let mut t = Token::new(id, form, lemma, upos, 0, deprel);
        t.xpos = Some(xpos.to_owned());
        self.tokens.push(t);
        id
    }

    fn attach(&mut self, id: usize, head: usize) {
        self.tokens[id - 1].head = head;
    }

    fn feats(&mut self, id: usize, feats: &str) {
        self.tokens[id - 1].feats = Some(feats.to_owned());
    }

    fn no_space_after(&mut self, id: usize) {
        self.tokens[id - 1].space_after = false;
    }

    fn last(&self) -> usize {
        self.tokens.len()
    }

    fn finish(mut self, rng: &mut SeededRng, root: usize) -> ParsedSentence {
        let term = match rng.gen_range(0..10) {
            0 => Some("!"),
            1 => Some("?"),
            2 => None,
            _ => Some("."),
        };
        if let Some(mark) = term {
            let last = self.last();
            self.no_space_after(last);
            let id = self.push(mark, mark, "PUNCT", mark, "punct");
            self.attach(id, root);
        }
        let last = self.last();
        self.tokens[last - 1].space_after = true;
        let first = &mut self.tokens[0];
        first.form = capitalize(&first.form);
        ParsedSentence::new(self.tokens).expect("template parse is well formed")
    }
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn pick<'a, T>(rng: &mut SeededRng, xs: &'a [T]) -> &'a T {
    xs.choose(rng).expect("non-empty word list")
}

/// Pushes a subject phrase; returns the id of its head and its agreement.
fn subject(b: &mut Builder, rng: &mut SeededRng, deprel: &str) -> (usize, Agreement) {
    match rng.gen_range(0..3) {
        0 => {
            let &(sg, pl) = pick(rng, NOUNS);
            let plural = rng.gen_bool(0.4);
            let det_form = if plural { *pick(rng, &["the", "my"]) } else { *pick(rng, DETERMINERS) };
            let det = b.push(det_form, det_form, "DET", "DT", "det");
            let (form, xpos, feats) = if plural {
                (pl, "NNS", "Number=Plur")
            } else {
                (sg, "NN", "Number=Sing")
            };
            let n = b.push(form, sg, "NOUN", xpos, deprel);
            b.feats(n, feats);
            b.attach(det, n);
            (
                n,
                Agreement {
                    third_singular: !plural,
                    first_singular: false,
                },
            )
        }
        1 => {
            let name = pick(rng, NAMES);
            let n = b.push(name, name, "PROPN", "NNP", deprel);
            b.feats(n, "Number=Sing");
            (
                n,
                Agreement {
                    third_singular: true,
                    first_singular: false,
                },
            )
        }
        _ => {
            let &(form, sg3, first) = pick(rng, PRONOUNS);
            let lemma = form.to_lowercase();
            let n = b.push(form, &lemma, "PRON", "PRP", deprel);
            (
                n,
                Agreement {
                    third_singular: sg3,
                    first_singular: first,
                },
            )
        }
    }
}

fn object(b: &mut Builder, rng: &mut SeededRng, verb: usize) {
    let d = pick(rng, DETERMINERS);
    let det = b.push(d, d, "DET", "DT", "det");
    let noun = pick(rng, OBJECTS);
    let n = b.push(noun, noun, "NOUN", "NN", "obj");
    b.feats(n, "Number=Sing");
    b.attach(det, n);
    b.attach(n, verb);
}

/// Pushes a finite verb agreeing with `agr`.
fn finite_verb(b: &mut Builder, rng: &mut SeededRng, agr: Agreement, deprel: &str) -> usize {
    let &(lemma, sg3, past) = pick(rng, VERBS);
    if rng.gen_bool(0.25) {
        b.push(past, lemma, "VERB", "VBD", deprel)
    } else if agr.third_singular {
        b.push(sg3, lemma, "VERB", "VBZ", deprel)
    } else {
        b.push(lemma, lemma, "VERB", "VBP", deprel)
    }
}

fn bare_verb(b: &mut Builder, rng: &mut SeededRng, deprel: &str) -> usize {
    let &(lemma, _, _) = pick(rng, VERBS);
    b.push(lemma, lemma, "VERB", "VB", deprel)
}

fn be_form(agr: Agreement) -> (&'static str, &'static str) {
    if agr.first_singular {
        ("am", "VBP")
    } else if agr.third_singular {
        ("is", "VBZ")
    } else {
        ("are", "VBP")
    }
}

fn do_form(agr: Agreement) -> (&'static str, &'static str) {
    if agr.third_singular {
        ("does", "VBZ")
    } else {
        ("do", "VBP")
    }
}

/// Subject + finite verb + object, as a clause headed by the verb.
fn simple_clause(b: &mut Builder, rng: &mut SeededRng, verb_deprel: &str) -> usize {
    let (s, agr) = subject(b, rng, "nsubj");
    let v = finite_verb(b, rng, agr, verb_deprel);
    b.attach(s, v);
    object(b, rng, v);
    v
}

/// Subject + modal + bare verb + object.
fn modal_clause(b: &mut Builder, rng: &mut SeededRng, verb_deprel: &str, negated: bool) -> usize {
    let (s, _) = subject(b, rng, "nsubj");
    let m = pick(rng, MODALS);
    let aux = b.push(m, m, "AUX", "MD", "aux");
    let neg = negated.then(|| b.push("not", "not", "PART", "RB", "advmod"));
    let v = bare_verb(b, rng, verb_deprel);
    for id in [Some(s), Some(aux), neg].into_iter().flatten() {
        b.attach(id, v);
    }
    object(b, rng, v);
    v
}

fn copula_clause(b: &mut Builder, rng: &mut SeededRng) -> usize {
    let (s, agr) = subject(b, rng, "nsubj");
    let (be, xpos) = be_form(agr);
    let cop = b.push(be, "be", "AUX", xpos, "cop");
    let adj = pick(rng, ADJECTIVES);
    let a = b.push(adj, adj, "ADJ", "JJ", "root");
    b.attach(s, a);
    b.attach(cop, a);
    a
}

/// One random sentence.
pub fn synthetic_sentence(rng: &mut SeededRng) -> ParsedSentence {
    let mut b = Builder::new();
    let root = match rng.gen_range(0..13) {
        0 | 1 => simple_clause(&mut b, rng, "root"),
        2 => modal_clause(&mut b, rng, "root", false),
        3 => copula_clause(&mut b, rng),
        4 => modal_clause(&mut b, rng, "root", true),
        5 => {
            // Subject do n't verb object.
            let (s, agr) = subject(&mut b, rng, "nsubj");
            let (d, xpos) = do_form(agr);
            let aux = b.push(d, "do", "AUX", xpos, "aux");
            b.no_space_after(aux);
            let neg = b.push("n't", "not", "PART", "RB", "advmod");
            let v = bare_verb(&mut b, rng, "root");
            for id in [s, aux, neg] {
                b.attach(id, v);
            }
            object(&mut b, rng, v);
            v
        }
        6 => {
            // Subject never verb object.
            let (s, agr) = subject(&mut b, rng, "nsubj");
            let never = b.push("never", "never", "ADV", "RB", "advmod");
            let v = finite_verb(&mut b, rng, agr, "root");
            b.attach(s, v);
            b.attach(never, v);
            object(&mut b, rng, v);
            v
        }
        7 => {
            // Main clause, then subordinate clause.
            let main = simple_clause(&mut b, rng, "root");
            let sub = pick(rng, SUBORDINATORS);
            let mark = b.push(sub, sub, "SCONJ", "IN", "mark");
            let v = simple_clause(&mut b, rng, "advcl");
            b.attach(mark, v);
            b.attach(v, main);
            main
        }
        8 => {
            // Subordinate clause, comma, main clause.
            let sub = pick(rng, SUBORDINATORS);
            let mark = b.push(sub, sub, "SCONJ", "IN", "mark");
            let v = simple_clause(&mut b, rng, "advcl");
            b.attach(mark, v);
            let last = b.last();
            b.no_space_after(last);
            let comma = b.push(",", ",", "PUNCT", ",", "punct");
            b.attach(comma, v);
            let main = modal_clause(&mut b, rng, "root", false);
            b.attach(v, main);
            main
        }
        9 => {
            // Interjection, comma, copular clause.
            let word = *pick(rng, &["yes", "well", "oh"]);
            let intj = b.push(word, word, "INTJ", "UH", "discourse");
            b.no_space_after(intj);
            let comma = b.push(",", ",", "PUNCT", ",", "punct");
            let head = copula_clause(&mut b, rng);
            b.attach(intj, head);
            b.attach(comma, head);
            head
        }
        10 => {
            // Verbless fragment: det adj noun.
            let d = pick(rng, DETERMINERS);
            let det = b.push(d, d, "DET", "DT", "det");
            let adj = pick(rng, ADJECTIVES);
            let a = b.push(adj, adj, "ADJ", "JJ", "amod");
            let noun = pick(rng, OBJECTS);
            let n = b.push(noun, noun, "NOUN", "NN", "root");
            b.feats(n, "Number=Sing");
            b.attach(det, n);
            b.attach(a, n);
            n
        }
        11 => {
            // Subject says that clause.
            let (s, agr) = subject(&mut b, rng, "nsubj");
            let (form, xpos) = if agr.third_singular { ("says", "VBZ") } else { ("say", "VBP") };
            let say = b.push(form, "say", "VERB", xpos, "root");
            b.attach(s, say);
            let that = b.push("that", "that", "SCONJ", "IN", "mark");
            let v = simple_clause(&mut b, rng, "ccomp");
            b.attach(that, v);
            b.attach(v, say);
            say
        }
        _ => {
            // Subject will not be adjective.
            let (s, _) = subject(&mut b, rng, "nsubj");
            let m = pick(rng, MODALS);
            let aux = b.push(m, m, "AUX", "MD", "aux");
            let neg = b.push("not", "not", "PART", "RB", "advmod");
            let cop = b.push("be", "be", "AUX", "VB", "cop");
            let adj = pick(rng, ADJECTIVES);
            let a = b.push(adj, adj, "ADJ", "JJ", "root");
            for id in [s, aux, neg, cop] {
                b.attach(id, a);
            }
            a
        }
    };
    b.finish(rng, root)
}

/// `n` sentences; sentence `i` is drawn from stream `(seed, i)`.
pub fn synthetic_corpus(n: usize, seed: u64) -> Vec<ParsedSentence> {
    (0..n)
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let mut s = synthetic_sentence(&mut rng);
            s.sent_id = Some(format!("synth-{i}"));
            s
        })
        .collect()
}
