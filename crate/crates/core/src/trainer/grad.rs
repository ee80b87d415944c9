//! Backpropagation of the batch InfoNCE loss through the encoder.

use rayon::prelude::*;

use super::encoder::{DropoutMask, ForwardCache, Param, ToyEncoder};
use super::loss::{cosine, info_nce_with_grad, InfoNce};
use super::TrainError;

/// Gradient of the mean batch loss, laid out like the encoder's tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    dim: usize,
    pub embedding: Vec<f64>,
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Gradients {
    pub fn zeros(encoder: &ToyEncoder) -> Self {
        Gradients {
            dim: encoder.dim,
            embedding: vec![0.0; encoder.embedding.len()],
            weight: vec![0.0; encoder.weight.len()],
            bias: vec![0.0; encoder.bias.len()],
        }
    }

    pub fn get(&self, p: Param) -> f64 {
        match p {
            Param::Embedding { row, col } => self.embedding[row * self.dim + col],
            Param::Weight { row, col } => self.weight[row * self.dim + col],
            Param::Bias(i) => self.bias[i],
        }
    }

    pub fn get_mut(&mut self, p: Param) -> &mut f64 {
        match p {
            Param::Embedding { row, col } => &mut self.embedding[row * self.dim + col],
            Param::Weight { row, col } => &mut self.weight[row * self.dim + col],
            Param::Bias(i) => &mut self.bias[i],
        }
    }
}

/// Token ids of one (anchor, positive) pair.
pub type IdPair = (Vec<usize>, Vec<usize>);

fn check_batch(encoder: &ToyEncoder, batch: &[IdPair], masks: &[(DropoutMask, DropoutMask)]) -> Result<(), TrainError> {
    if batch.is_empty() {
        return Err(TrainError::EmptyInput);
    }
    if batch.len() != masks.len() {
        return Err(TrainError::Shape(format!("{} pairs but {} mask pairs", batch.len(), masks.len())));
    }
    if batch.iter().any(|(a, p)| a.is_empty() || p.is_empty()) {
        return Err(TrainError::EmptyInput);
    }
    let dim = encoder.dim;
    if masks.iter().any(|(a, p)| a.scale().len() != dim || p.scale().len() != dim) {
        return Err(TrainError::Shape(format!("masks must have {dim} entries")));
    }
    Ok(())
}

fn forward(encoder: &ToyEncoder, batch: &[IdPair], masks: &[(DropoutMask, DropoutMask)]) -> Vec<(ForwardCache, ForwardCache)> {
    batch
        .par_iter()
        .zip(masks.par_iter())
        .map(|((a, p), (ma, mp))| (encoder.forward_train(a.clone(), ma), encoder.forward_train(p.clone(), mp)))
        .collect()
}

fn similarities(caches: &[(ForwardCache, ForwardCache)]) -> Result<Vec<Vec<f64>>, TrainError> {
    caches
        .iter()
        .map(|(h, _)| caches.iter().map(|(_, p)| cosine(&h.output, &p.output)).collect())
        .collect()
}

/// Train-mode batch loss.
pub fn batch_loss(
    encoder: &ToyEncoder,
    batch: &[IdPair],
    masks: &[(DropoutMask, DropoutMask)],
    temperature: f64,
) -> Result<InfoNce, TrainError> {
    check_batch(encoder, batch, masks)?;
    let sim = similarities(&forward(encoder, batch, masks))?;
    Ok(info_nce_with_grad(&sim, temperature)?.loss)
}

/// `d cos(u, v) / d u`.
fn cosine_grad(u: &[f64], v: &[f64], cos: f64) -> Vec<f64> {
    let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    u.iter()
        .zip(v)
        .map(|(a, b)| b / (nu * nv) - cos * a / (nu * nu))
        .collect()
}

/// Train-mode batch loss and its exact gradient.
pub fn loss_and_gradients(
    encoder: &ToyEncoder,
    batch: &[IdPair],
    masks: &[(DropoutMask, DropoutMask)],
    temperature: f64,
) -> Result<(InfoNce, Gradients), TrainError> {
    check_batch(encoder, batch, masks)?;
    let caches = forward(encoder, batch, masks);
    let sim = similarities(&caches)?;
    let grad = info_nce_with_grad(&sim, temperature)?;
    let n = caches.len();
    let dim = encoder.dim;

    // Gradients w.r.t. each anchor and positive output vector.
    let mut d_out: Vec<(Vec<f64>, Vec<f64>)> = vec![(vec![0.0; dim], vec![0.0; dim]); n];
    for i in 0..n {
        for j in 0..n {
            let g = grad.d_sim[i][j];
            if g == 0.0 {
                continue;
            }
            let (h, p) = (&caches[i].0.output, &caches[j].1.output);
            let s = sim[i][j];
            for (acc, x) in d_out[i].0.iter_mut().zip(cosine_grad(h, p, s)) {
                *acc += g * x;
            }
            for (acc, x) in d_out[j].1.iter_mut().zip(cosine_grad(p, h, s)) {
                *acc += g * x;
            }
        }
    }

    let mut out = Gradients::zeros(encoder);
    for ((ca, cp), (da, dp)) in caches.iter().zip(&d_out) {
        backprop_one(encoder, ca, da, &mut out);
        backprop_one(encoder, cp, dp, &mut out);
    }
    Ok((grad.loss, out))
}

fn backprop_one(encoder: &ToyEncoder, cache: &ForwardCache, d_output: &[f64], out: &mut Gradients) {
    let dim = encoder.dim;
    let d_pre: Vec<f64> = cache
        .output
        .iter()
        .zip(d_output)
        .map(|(h, g)| g * (1.0 - h * h))
        .collect();
    let mut d_masked = vec![0.0; dim];
    for (r, &g) in d_pre.iter().enumerate() {
        out.bias[r] += g;
        let row = r * dim;
        for (c, d) in d_masked.iter_mut().enumerate() {
            out.weight[row + c] += g * cache.masked[c];
            *d += g * encoder.weight[row + c];
        }
    }
    let count = cache.ids.len() as f64;
    let d_pooled: Vec<f64> = d_masked
        .iter()
        .zip(cache.mask.scale())
        .map(|(g, s)| g * s / count)
        .collect();
    for &id in &cache.ids {
        let row = id * dim;
        for (acc, g) in out.embedding[row..row + dim].iter_mut().zip(&d_pooled) {
            *acc += g;
        }
    }
}

/// Plain SGD update.
pub(crate) fn sgd_step(encoder: &mut ToyEncoder, grads: &Gradients, learning_rate: f64) {
    let pairs = [
        (&mut encoder.embedding, &grads.embedding),
        (&mut encoder.weight, &grads.weight),
        (&mut encoder.bias, &grads.bias),
    ];
    for (params, g) in pairs {
        for (w, d) in params.iter_mut().zip(g) {
            *w -= learning_rate * d;
        }
    }
}
