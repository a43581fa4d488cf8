//! Synthetic stand-in for W8A: sparse binary keyword vectors with a skewed
//! label split.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use decentral_core::ingest::{serialize, Sample};

#[derive(Clone, Debug)]
pub struct SynthSpec {
    pub samples: usize,
    pub features: usize,
    /// Fraction of `+1` labels.
    pub positive_rate: f64,
    /// Keyword features that positives use more often.
    pub keywords: usize,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self { samples: 1000, features: 300, positive_rate: 0.03, keywords: 20, seed: 8 }
    }
}

/// Feature `j` (1-based) fires with probability `0.47·j^-0.6`, about 12
/// active features per sample. Positives fire each keyword with an extra
/// probability 0.35 and, like W8A positives, are longer documents.
pub fn generate(spec: &SynthSpec) -> Vec<Sample<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let d = spec.features;
    let keyword_start = d / 4;
    let keywords: Vec<usize> = (0..spec.keywords).map(|k| keyword_start + k * (d - keyword_start) / spec.keywords.max(1)).collect();
    let base: Vec<f64> = (1..=d).map(|j| 0.47 * (j as f64).powf(-0.6)).collect();
    (0..spec.samples)
        .map(|_| {
            let positive = rng.random::<f64>() < spec.positive_rate;
            let boost = if positive { 1.6 } else { 1.0 };
            let mut indices = Vec::new();
            for (j, &p) in base.iter().enumerate() {
                let mut q = (p * boost).min(0.95);
                if positive && keywords.contains(&j) {
                    q = 1.0 - (1.0 - q) * 0.65;
                }
                if rng.random::<f64>() < q {
                    indices.push(j + 1);
                }
            }
            let values = vec![1.0; indices.len()];
            Sample { label: if positive { 1 } else { -1 }, indices, values }
        })
        .collect()
}

pub fn generate_text(spec: &SynthSpec) -> String {
    serialize(&generate(spec))
}
