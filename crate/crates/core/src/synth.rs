//! Synthetic embedding sets: drifting attack sequences and a fine-tuning
//! stand-in that pulls a test distribution back toward the reference.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::engine::EmbeddingSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Family {
    /// Every value i.i.d. `Normal(shift, scale^2)`.
    Gaussian,
    /// Each row picks one component by weight; component `k` of `K` is
    /// centered at `shift + (k - (K-1)/2) * 2 * scale`.
    GaussianMixture { weights: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub dim: usize,
    pub count: usize,
    pub family: Family,
    pub shift: f64,
    pub scale: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn gaussian(dim: usize, count: usize, shift: f64, seed: u64) -> Self {
        Self {
            dim,
            count,
            family: Family::Gaussian,
            shift,
            scale: 1.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidParameter(msg));
        if self.dim == 0 {
            return invalid("dim must be positive".into());
        }
        if self.count == 0 {
            return invalid("count must be positive".into());
        }
        if !self.shift.is_finite() {
            return invalid(format!("shift must be finite, got {}", self.shift));
        }
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return invalid(format!("scale must be positive, got {}", self.scale));
        }
        if let Family::GaussianMixture { weights } = &self.family {
            if weights.is_empty() || weights.iter().any(|w| !(*w >= 0.0)) {
                return invalid("mixture weights must be nonempty and nonnegative".into());
            }
            let sum: f64 = weights.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return invalid(format!("mixture weights sum to {sum}, expected 1"));
            }
        }
        Ok(())
    }
}

/// Independent stream `stream` of the generator seeded with `seed`.
fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn pick_component(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (k, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return k;
        }
    }
    weights.len() - 1
}

fn generate_with(spec: &SynthSpec, rng: &mut ChaCha8Rng, label: String) -> Result<EmbeddingSet> {
    spec.validate()?;
    let mut data = Vec::with_capacity(spec.dim * spec.count);
    for _ in 0..spec.count {
        let center = match &spec.family {
            Family::Gaussian => spec.shift,
            Family::GaussianMixture { weights } => {
                let k = pick_component(weights, rng.random::<f64>());
                let offset = k as f64 - (weights.len() - 1) as f64 / 2.0;
                spec.shift + offset * 2.0 * spec.scale
            }
        };
        for _ in 0..spec.dim {
            let z: f64 = rng.sample(StandardNormal);
            data.push(center + spec.scale * z);
        }
    }
    EmbeddingSet::new(spec.dim, data, label)
}

/// Draws one set. Identical specs give bitwise-identical sets.
pub fn generate(spec: &SynthSpec) -> Result<EmbeddingSet> {
    generate_with(spec, &mut stream_rng(spec.seed, 0), format!("shift={}", spec.shift))
}

/// One set per shift, in order. Set `k` draws from stream `k + 1` of the
/// base seed, so appending shifts never changes earlier sets and no set
/// reuses the stream of [`generate`] on the base spec.
pub fn evolve_sequence(base: &SynthSpec, shifts: &[f64]) -> Result<Vec<EmbeddingSet>> {
    if shifts.is_empty() {
        return Err(Error::Empty("shift list"));
    }
    shifts
        .iter()
        .enumerate()
        .map(|(k, &shift)| {
            let spec = SynthSpec {
                shift,
                ..base.clone()
            };
            let mut rng = stream_rng(base.seed, k as u64 + 1);
            generate_with(&spec, &mut rng, format!("shift={shift}"))
        })
        .collect()
}

/// Resamples `test.len()` rows with replacement, each taken from the
/// reference with probability `lambda` and from the test set otherwise.
pub fn simulate_finetune(
    test: &EmbeddingSet,
    reference: &EmbeddingSet,
    lambda: f64,
    seed: u64,
) -> Result<EmbeddingSet> {
    if test.dim() != reference.dim() {
        return Err(Error::DimensionMismatch {
            expected: reference.dim(),
            found: test.dim(),
        });
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!(
            "lambda must lie in [0, 1], got {lambda}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(test.data().len());
    for _ in 0..test.len() {
        let source = if rng.random::<f64>() < lambda { reference } else { test };
        let row = rng.random_range(0..source.len());
        data.extend_from_slice(source.row(row));
    }
    EmbeddingSet::new(test.dim(), data, format!("{}+ft{lambda}", test.label()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let spec = SynthSpec::gaussian(4, 50, 0.3, 42);
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let other = SynthSpec { seed: 43, ..spec.clone() };
        assert_ne!(generate(&spec).unwrap(), generate(&other).unwrap());
    }

    #[test]
    fn gaussian_means() {
        let set = generate(&SynthSpec::gaussian(4, 10_000, 0.0, 1)).unwrap();
        for d in 0..4 {
            let col = set.column(d);
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            assert!(mean.abs() < 0.05, "dim {d} mean {mean}");
        }
    }

    #[test]
    fn single_row() {
        let set = generate(&SynthSpec::gaussian(3, 1, 0.0, 1)).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.dim(), 3);
    }

    #[test]
    fn mixture_components() {
        let spec = SynthSpec {
            family: Family::GaussianMixture { weights: vec![0.5, 0.5] },
            scale: 0.1,
            ..SynthSpec::gaussian(2, 4000, 1.0, 5)
        };
        let set = generate(&spec).unwrap();
        // components at 0.9 and 1.1; rows keep one component across dims
        let low = set.rows().filter(|r| r[0] < 1.0).count() as f64 / 4000.0;
        assert!((low - 0.5).abs() < 0.05);
        let col = set.column(0);
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        assert!((mean - 1.0).abs() < 0.01);
    }

    #[test]
    fn invalid_specs() {
        let ok = SynthSpec::gaussian(2, 10, 0.0, 0);
        assert!(generate(&SynthSpec { count: 0, ..ok.clone() }).is_err());
        assert!(generate(&SynthSpec { dim: 0, ..ok.clone() }).is_err());
        assert!(generate(&SynthSpec { scale: 0.0, ..ok.clone() }).is_err());
        let bad_weights = SynthSpec {
            family: Family::GaussianMixture { weights: vec![0.5, 0.6] },
            ..ok.clone()
        };
        assert!(generate(&bad_weights).is_err());
        assert!(evolve_sequence(&ok, &[]).is_err());
    }

    #[test]
    fn sequence_prefix_is_stable() {
        let base = SynthSpec::gaussian(2, 20, 0.0, 9);
        let short = evolve_sequence(&base, &[0.0, 0.5]).unwrap();
        let long = evolve_sequence(&base, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(short[..], long[..2]);
        assert_eq!(long[2].label(), "shift=1");
        assert_ne!(short[0], generate(&base).unwrap());
    }

    #[test]
    fn finetune_membership() {
        let test = generate(&SynthSpec::gaussian(3, 30, 2.0, 1)).unwrap();
        let reference = generate(&SynthSpec::gaussian(3, 30, 0.0, 2)).unwrap();
        let resampled = simulate_finetune(&test, &reference, 0.0, 7).unwrap();
        assert_eq!(resampled.len(), test.len());
        assert!(resampled.rows().all(|r| test.rows().any(|t| t == r)));
        let pulled = simulate_finetune(&test, &reference, 1.0, 7).unwrap();
        assert!(pulled.rows().all(|r| reference.rows().any(|t| t == r)));
        assert!(simulate_finetune(&test, &reference, 1.5, 7).is_err());
        let narrow = generate(&SynthSpec::gaussian(2, 5, 0.0, 1)).unwrap();
        assert!(simulate_finetune(&narrow, &reference, 0.5, 7).is_err());
    }
}
