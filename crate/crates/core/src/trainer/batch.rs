//! Mini-batch assembly with a controlled share of augmented positives.

use rand::Rng;

use crate::rng::{stream_rng, PROPORTION_STREAM_BASE};

/// One training sentence: its tokens and those of its augmented positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingExample {
    pub anchor: Vec<String>,
    pub positive: Vec<String>,
    pub changed: bool,
}

/// Whether example `index` trains against its augmented positive. The draw
/// is fixed per (seed, example), so the augmented share of the corpus is
/// the same in every epoch.
pub fn uses_augmented(seed: u64, index: usize, proportion: f64) -> bool {
    if proportion >= 1.0 {
        return true;
    }
    if proportion <= 0.0 {
        return false;
    }
    stream_rng(seed, PROPORTION_STREAM_BASE + index as u64).gen::<f64>() < proportion
}

/// Token lists for the batch members at `indices`. Members that do not use
/// their augmented positive are paired with themselves.
pub fn build_batch(
    examples: &[TrainingExample],
    proportion: f64,
    seed: u64,
    indices: &[usize],
) -> Vec<(Vec<String>, Vec<String>)> {
    indices
        .iter()
        .map(|&i| {
            let ex = &examples[i];
            let positive = if uses_augmented(seed, i, proportion) {
                ex.positive.clone()
            } else {
                ex.anchor.clone()
            };
            (ex.anchor.clone(), positive)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(n: usize) -> Vec<TrainingExample> {
        (0..n)
            .map(|i| TrainingExample {
                anchor: vec![format!("w{i}"), ".".into()],
                positive: vec![format!("w{i}"), "!".into()],
                changed: true,
            })
            .collect()
    }

    #[test]
    fn extremes() {
        let ex = corpus(50);
        let all: Vec<usize> = (0..50).collect();
        assert!(build_batch(&ex, 0.0, 3, &all).iter().all(|(a, p)| a == p));
        assert!(build_batch(&ex, 1.0, 3, &all).iter().all(|(a, p)| a != p));
    }

    #[test]
    fn half_proportion_is_near_half() {
        let ex = corpus(1000);
        let all: Vec<usize> = (0..1000).collect();
        let augmented = build_batch(&ex, 0.5, 11, &all).iter().filter(|(a, p)| a != p).count();
        assert!((440..=560).contains(&augmented), "{augmented}");
    }
}
