//! Analytic values and properties of the in-batch InfoNCE loss.

use proptest::prelude::*;
use rand::Rng;
use sda_core::rng::stream_rng;
use sda_core::trainer::{info_nce_from_similarities, info_nce_loss, DropoutMask, EmbeddingVector};

const TAU: f64 = 0.05;

/// Reference: -log of the softmax entry, computed naively.
fn naive(sim: &[Vec<f64>], tau: f64) -> Vec<f64> {
    sim.iter()
        .enumerate()
        .map(|(i, row)| {
            let z: f64 = row.iter().map(|s| (s / tau).exp()).sum();
            -((row[i] / tau).exp() / z).ln()
        })
        .collect()
}

fn matrix(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0f64..=1.0, n), n)
}

fn sized_matrix() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..8).prop_flat_map(matrix)
}

#[test]
fn single_pair_is_exactly_zero() {
    for seed in 0..20 {
        let mut rng = stream_rng(seed, 0);
        let v = |rng: &mut _| EmbeddingVector((0..6).map(|_| Rng::gen_range(rng, -1.0..1.0)).collect());
        let (h, p) = (v(&mut rng), v(&mut rng));
        let loss = info_nce_loss(&[(h, p)], TAU).unwrap();
        assert_eq!(loss.mean, 0.0);
    }
}

#[test]
fn uniform_batch_of_four_gives_ln_4() {
    let loss = info_nce_from_similarities(&vec![vec![0.2; 4]; 4], TAU).unwrap();
    for l in loss.per_example {
        assert!((l - 4f64.ln()).abs() < 1e-9);
    }
}

#[test]
fn identity_two_by_two() {
    let loss = info_nce_from_similarities(&[vec![1.0, 0.0], vec![0.0, 1.0]], TAU).unwrap();
    let expected = (-20f64).exp().ln_1p();
    assert_eq!(loss.per_example, vec![expected, expected]);
}

#[test]
fn monotone_in_positive_similarity() {
    // 100 random trials: raising s_ii with everything else fixed lowers loss_i.
    let mut rng = stream_rng(99, 0);
    for _ in 0..100 {
        let n = rng.gen_range(2..9);
        let mut sim: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..0.9)).collect())
            .collect();
        let i = rng.gen_range(0..n);
        let before = info_nce_from_similarities(&sim, TAU).unwrap();
        sim[i][i] += rng.gen_range(0.001..0.1);
        let after = info_nce_from_similarities(&sim, TAU).unwrap();
        assert!(after.per_example[i] < before.per_example[i]);
        for j in (0..n).filter(|&j| j != i) {
            assert_eq!(after.per_example[j], before.per_example[j]);
        }
    }
}

#[test]
fn dropout_mask_is_unbiased() {
    let v: Vec<f64> = (0..16).map(|k| 0.5 + k as f64 * 0.1).collect();
    let mut rng = stream_rng(3, 0);
    let draws = 10_000;
    let mut sum = vec![0.0; v.len()];
    for _ in 0..draws {
        let m = DropoutMask::sample(v.len(), 0.1, &mut rng);
        for (acc, x) in sum.iter_mut().zip(m.apply(&v)) {
            *acc += x;
        }
    }
    for (s, x) in sum.iter().zip(&v) {
        let mean = s / draws as f64;
        assert!(((mean - x) / x).abs() < 0.02, "{mean} vs {x}");
    }
}

proptest! {
    #[test]
    fn non_negative_and_matches_naive(sim in sized_matrix(), tau in 0.05f64..2.0) {
        let loss = info_nce_from_similarities(&sim, tau).unwrap();
        for (l, r) in loss.per_example.iter().zip(naive(&sim, tau)) {
            prop_assert!(*l >= 0.0);
            prop_assert!((l - r).abs() <= 1e-9 * r.abs().max(1.0), "{} vs {}", l, r);
        }
    }

    #[test]
    fn batch_order_permutes_losses(sim in sized_matrix(), rot in 0usize..8) {
        let n = sim.len();
        let perm: Vec<usize> = (0..n).map(|k| (k + rot) % n).collect();
        let permuted: Vec<Vec<f64>> = perm.iter().map(|&i| perm.iter().map(|&j| sim[i][j]).collect()).collect();
        let a = info_nce_from_similarities(&sim, TAU).unwrap();
        let b = info_nce_from_similarities(&permuted, TAU).unwrap();
        for (k, &i) in perm.iter().enumerate() {
            prop_assert!((b.per_example[k] - a.per_example[i]).abs() < 1e-12);
        }
        prop_assert!((a.mean - b.mean).abs() < 1e-12);
    }
}
