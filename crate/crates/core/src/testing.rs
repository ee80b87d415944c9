//! Fixtures shared by unit tests.

use crate::conllu::{build_sentence, parse_conllu, ParsedSentence, Row};

pub(crate) fn sentence(rows: &[Row<'_>]) -> ParsedSentence {
    build_sentence(rows).expect("fixture sentence is well formed")
}

pub(crate) fn shareholder() -> ParsedSentence {
    parse_conllu(include_str!("../fixtures/worked_example.conllu"))
        .expect("fixture parses")
        .remove(0)
}
