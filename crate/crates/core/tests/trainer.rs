//! Gradient correctness and training behavior.

use sda_core::augment::Method;
use sda_core::conllu::parse_conllu;
use sda_core::eval::{alignment, evaluate_sts, parse_sts_tsv, EvalError};
use sda_core::synth::synthetic_corpus;
use sda_core::trainer::gradcheck::check_config;
use sda_core::trainer::{
    build_batch, gradient_check, gradient_check_with, loss_and_gradients, train, training_examples, vocabulary_of,
    ConfigFile, ToyEncoder, TrainConfig, Vocabulary,
};

fn config(seed: u64, dim: usize, temperature: f64, method: Method) -> ConfigFile {
    ConfigFile {
        train: TrainConfig {
            seed,
            dim,
            temperature,
            method,
            batch_size: 6,
            ..TrainConfig::default()
        },
        check_samples: 40,
        ..ConfigFile::default()
    }
}

#[test]
fn gradients_match_central_differences() {
    let corpus = synthetic_corpus(30, 17);
    let setups = [
        (1, 8, 0.05, Method::Pi),
        (2, 16, 0.1, Method::Aa),
        (3, 5, 0.05, Method::Dn),
        (4, 12, 0.5, Method::Pi),
        (5, 24, 0.07, Method::Identity),
    ];
    for (seed, dim, tau, method) in setups {
        let report = check_config(&corpus, &config(seed, dim, tau, method)).unwrap();
        assert!(report.passed, "{report:?}");
        assert!(report.checked >= 20);
        assert!(report.max_relative_error < 1e-4);
    }
}

#[test]
fn identity_projector_single_pair() {
    let vocab = Vocabulary::build(["a", "b", "c"]);
    let dim = 4;
    let mut weight = vec![0.0; dim * dim];
    for i in 0..dim {
        weight[i * dim + i] = 1.0;
    }
    let base = ToyEncoder::init(vocab.clone(), dim, 0.0, 3);
    let embedding = (0..vocab.len()).flat_map(|r| base.embedding_row(r).to_vec()).collect();
    let enc = ToyEncoder::from_parts(vocab, dim, embedding, weight, vec![0.0; dim], 0.0).unwrap();
    let batch = vec![(vec!["a".to_owned(), "b".to_owned()], vec!["b".to_owned(), "c".to_owned()])];
    let report = gradient_check(&enc, &batch, 0.05, 1e-4, 20, 0).unwrap();
    assert!(report.passed);
    assert_eq!(report.checked, 20);
}

#[test]
fn sign_flipped_gradient_is_caught() {
    let corpus = synthetic_corpus(12, 4);
    let examples = training_examples(&corpus, Method::Pi, &Default::default(), 4).unwrap();
    let enc = ToyEncoder::init(vocabulary_of(&examples), 8, 0.0, 4);
    let batch = build_batch(&examples, 1.0, 4, &(0..6).collect::<Vec<_>>());
    let flipped = |e: &ToyEncoder, b: &[_], m: &[_], t: f64| {
        let (loss, mut g) = loss_and_gradients(e, b, m, t)?;
        g.embedding.iter_mut().chain(&mut g.weight).chain(&mut g.bias).for_each(|x| *x = -*x);
        Ok((loss, g))
    };
    let report = gradient_check_with(&enc, &batch, 0.05, 1e-4, 30, 4, flipped).unwrap();
    assert!(!report.passed);
    assert!(report.worst.is_some());
    assert!(!report.offending.is_empty());
}

#[test]
fn training_halves_the_loss_and_aligns_positives() {
    let corpus = synthetic_corpus(200, 42);
    let config = TrainConfig::default();
    let out = train(&corpus, &config).unwrap();
    let t = &out.trace;
    let first = t[..10].iter().sum::<f64>() / 10.0;
    let last = t[t.len() - 10..].iter().sum::<f64>() / 10.0;
    assert!(last < 0.5 * first, "first {first}, last {last}");
    let a = alignment(&out.encoder, &out.examples, 1).unwrap();
    assert!(a.positive > a.random, "{a:?}");
}

#[test]
fn zero_proportion_means_self_pairs_only() {
    let corpus = synthetic_corpus(200, 42);
    let examples = training_examples(&corpus, Method::Pi, &Default::default(), 42).unwrap();
    assert!(examples.iter().all(|e| e.changed));
    let all: Vec<usize> = (0..examples.len()).collect();
    assert!(build_batch(&examples, 0.0, 42, &all).iter().all(|(a, p)| a == p));
    assert!(build_batch(&examples, 1.0, 42, &all).iter().all(|(a, p)| a != p));
}

/// One-hot embeddings make eval-mode cosine a function of token overlap.
fn overlap_encoder() -> ToyEncoder {
    let vocab = Vocabulary::build(["a", "b", "c", "d", "e", "f"]);
    let v = vocab.len();
    let mut embedding = vec![0.0; v * v];
    for i in 0..v {
        embedding[i * v + i] = 1.0;
    }
    ToyEncoder::from_parts(vocab, v, embedding, vec![0.0; v * v], vec![0.0; v], 0.0).unwrap()
}

#[test]
fn sts_ranking_follows_overlap() {
    let enc = overlap_encoder();
    // Cosines 1, 2/3 and 0.
    let tsv = "a b c\ta b c\t5.0\na b c\ta b d\t3.0\na b c\td e f\t0.5\n";
    let mut examples = parse_sts_tsv(tsv).unwrap();
    assert_eq!(evaluate_sts(&enc, &examples).unwrap(), 1.0);
    examples.reverse();
    assert_eq!(evaluate_sts(&enc, &examples).unwrap(), 1.0);
    let flat = parse_sts_tsv("a\tb\t2\nc\tc\t2\n").unwrap();
    assert_eq!(evaluate_sts(&enc, &flat), Err(EvalError::Constant));
}

#[test]
fn dn_fixture_corpus_parses() {
    let corpus = parse_conllu(include_str!("../fixtures/single_site.conllu")).unwrap();
    assert_eq!(corpus.len(), 6);
}
