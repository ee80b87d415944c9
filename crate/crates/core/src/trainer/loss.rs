//! Cosine similarity and the in-batch InfoNCE objective.

use super::encoder::EmbeddingVector;
use super::TrainError;

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn norm(u: &[f64]) -> f64 {
    dot(u, u).sqrt()
}

pub(crate) fn cosine(u: &[f64], v: &[f64]) -> Result<f64, TrainError> {
    if u.len() != v.len() {
        return Err(TrainError::Shape(format!(
            "vectors of length {} and {}",
            u.len(),
            v.len()
        )));
    }
    let (nu, nv) = (norm(u), norm(v));
    if nu == 0.0 || nv == 0.0 {
        return Err(TrainError::ZeroVector);
    }
    Ok((dot(u, v) / (nu * nv)).clamp(-1.0, 1.0))
}

pub fn cosine_similarity(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<f64, TrainError> {
    cosine(u.as_slice(), v.as_slice())
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfoNce {
    pub mean: f64,
    pub per_example: Vec<f64>,
}

/// Loss and its gradient with respect to the similarity matrix.
pub(crate) struct InfoNceGrad {
    pub loss: InfoNce,
    /// `d mean / d sim[i][j]`.
    pub d_sim: Vec<Vec<f64>>,
}

/// InfoNCE from a precomputed `N x N` similarity matrix, where entry
/// `[i][j]` compares anchor `i` with positive `j`:
///
/// `loss_i = -log( exp(s_ii / t) / sum_j exp(s_ij / t) )`
pub fn info_nce_from_similarities(sim: &[Vec<f64>], temperature: f64) -> Result<InfoNce, TrainError> {
    Ok(info_nce_with_grad(sim, temperature)?.loss)
}

pub(crate) fn info_nce_with_grad(sim: &[Vec<f64>], temperature: f64) -> Result<InfoNceGrad, TrainError> {
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(TrainError::Config(format!("temperature must be positive, got {temperature}")));
    }
    let n = sim.len();
    if n == 0 {
        return Err(TrainError::EmptyInput);
    }
    if sim.iter().any(|row| row.len() != n) {
        return Err(TrainError::Shape("similarity matrix must be square".into()));
    }

    let mut per_example = Vec::with_capacity(n);
    let mut d_sim = vec![vec![0.0; n]; n];
    for (i, row) in sim.iter().enumerate() {
        let logits: Vec<f64> = row.iter().map(|s| s / temperature).collect();
        let (top, &max) = logits
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty row");
        let shifted: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
        let rest: f64 = shifted
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != top)
            .map(|(_, e)| e)
            .sum();
        // (max - l_ii) and ln(1 + rest) are each non-negative.
        per_example.push((max - logits[i]) + rest.ln_1p());

        let total = 1.0 + rest;
        for (j, e) in shifted.iter().enumerate() {
            let softmax = e / total;
            let target = if i == j { 1.0 } else { 0.0 };
            d_sim[i][j] = (softmax - target) / (temperature * n as f64);
        }
    }

    let mean = per_example.iter().sum::<f64>() / n as f64;
    Ok(InfoNceGrad {
        loss: InfoNce { mean, per_example },
        d_sim,
    })
}

/// InfoNCE over `(anchor, positive)` embedding pairs with in-batch negatives.
pub fn info_nce_loss(
    pairs: &[(EmbeddingVector, EmbeddingVector)],
    temperature: f64,
) -> Result<InfoNce, TrainError> {
    let sim = similarity_matrix(pairs)?;
    info_nce_from_similarities(&sim, temperature)
}

pub(crate) fn similarity_matrix(pairs: &[(EmbeddingVector, EmbeddingVector)]) -> Result<Vec<Vec<f64>>, TrainError> {
    pairs
        .iter()
        .map(|(h, _)| {
            pairs
                .iter()
                .map(|(_, p)| cosine_similarity(h, p))
                .collect::<Result<Vec<f64>, _>>()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> EmbeddingVector {
        EmbeddingVector(xs.to_vec())
    }

    #[test]
    fn cosine_values() {
        let h = v(&[0.3, -1.2, 2.0]);
        assert!((cosine_similarity(&h, &h).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(cosine_similarity(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap(), 0.0);
        let c = cosine_similarity(&v(&[1.0, 1.0]), &v(&[1.0, 0.0])).unwrap();
        assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(matches!(
            cosine_similarity(&v(&[0.0, 0.0]), &v(&[1.0, 0.0])),
            Err(TrainError::ZeroVector)
        ));
    }

    #[test]
    fn single_pair_has_zero_loss() {
        let loss = info_nce_loss(&[(v(&[1.0, 2.0]), v(&[-3.0, 0.5]))], 0.05).unwrap();
        assert_eq!(loss.mean, 0.0);
        assert_eq!(loss.per_example, vec![0.0]);
    }

    #[test]
    fn uniform_similarities_give_log_n() {
        let sim = vec![vec![0.37; 4]; 4];
        let loss = info_nce_from_similarities(&sim, 0.05).unwrap();
        for l in loss.per_example {
            assert!((l - 4f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn two_by_two_identity() {
        let sim = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let loss = info_nce_from_similarities(&sim, 0.05).unwrap();
        // Direct evaluation of -ln(e^20 / (e^20 + e^0)).
        let expected = -(20f64.exp() / (20f64.exp() + 1.0)).ln();
        let closed_form = (-20f64).exp().ln_1p();
        for l in &loss.per_example {
            assert_eq!(*l, closed_form);
            assert!((l - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn temperature_must_be_positive() {
        let sim = vec![vec![1.0]];
        assert!(matches!(info_nce_from_similarities(&sim, 0.0), Err(TrainError::Config(_))));
        assert!(matches!(info_nce_from_similarities(&sim, -1.0), Err(TrainError::Config(_))));
    }

    #[test]
    fn gradient_matches_finite_difference_of_similarities() {
        let sim = vec![
            vec![0.9, 0.1, -0.3],
            vec![0.2, 0.5, 0.4],
            vec![-0.1, 0.7, 0.8],
        ];
        let tau = 0.2;
        let grad = info_nce_with_grad(&sim, tau).unwrap().d_sim;
        let h = 1e-6;
        for i in 0..3 {
            for j in 0..3 {
                let mut up = sim.clone();
                up[i][j] += h;
                let mut down = sim.clone();
                down[i][j] -= h;
                let fd = (info_nce_from_similarities(&up, tau).unwrap().mean
                    - info_nce_from_similarities(&down, tau).unwrap().mean)
                    / (2.0 * h);
                assert!((fd - grad[i][j]).abs() < 1e-8, "{i},{j}: {fd} vs {}", grad[i][j]);
            }
        }
    }
}
