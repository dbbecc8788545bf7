use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What to do with a sample that falls outside `[lower_edge, upper_edge]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgePolicy {
    /// Out-of-range samples are counted in the first or last bin.
    Clamp,
    /// Out-of-range samples are an error.
    Reject,
}

/// Equal-width binning over `[lower_edge, upper_edge]`.
///
/// Bins are half-open `[e_i, e_{i+1})` except the last, which is closed, so
/// every in-range value maps to exactly one bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    bin_count: usize,
    lower_edge: f64,
    upper_edge: f64,
    edge_policy: EdgePolicy,
}

impl HistogramSpec {
    pub fn new(
        bin_count: usize,
        lower_edge: f64,
        upper_edge: f64,
        edge_policy: EdgePolicy,
    ) -> Result<Self> {
        if bin_count < 2 {
            return Err(Error::InvalidSpec(format!(
                "bin_count must be at least 2, got {bin_count}"
            )));
        }
        if !lower_edge.is_finite() || !upper_edge.is_finite() {
            return Err(Error::InvalidSpec("edges must be finite".into()));
        }
        if lower_edge >= upper_edge {
            return Err(Error::InvalidSpec(format!(
                "lower_edge {lower_edge} must be below upper_edge {upper_edge}"
            )));
        }
        Ok(Self {
            bin_count,
            lower_edge,
            upper_edge,
            edge_policy,
        })
    }

    pub fn bin_count(&self) -> usize {
        self.bin_count
    }

    pub fn lower_edge(&self) -> f64 {
        self.lower_edge
    }

    pub fn upper_edge(&self) -> f64 {
        self.upper_edge
    }

    pub fn edge_policy(&self) -> EdgePolicy {
        self.edge_policy
    }

    /// Same edges, different policy.
    pub fn with_policy(self, edge_policy: EdgePolicy) -> Self {
        Self {
            edge_policy,
            ..self
        }
    }

    pub fn bin_width(&self) -> f64 {
        (self.upper_edge - self.lower_edge) / self.bin_count as f64
    }

    /// Bin centers, in ascending order.
    pub fn centers(&self) -> Vec<f64> {
        let width = self.bin_width();
        (0..self.bin_count)
            .map(|i| self.lower_edge + (i as f64 + 0.5) * width)
            .collect()
    }

    /// Bin index for `x`, or `None` when `x` is out of range under
    /// [`EdgePolicy::Reject`] (or is NaN).
    pub fn bin_index(&self, x: f64) -> Option<usize> {
        if x.is_nan() {
            return None;
        }
        let last = self.bin_count - 1;
        if x < self.lower_edge {
            return match self.edge_policy {
                EdgePolicy::Clamp => Some(0),
                EdgePolicy::Reject => None,
            };
        }
        if x > self.upper_edge {
            return match self.edge_policy {
                EdgePolicy::Clamp => Some(last),
                EdgePolicy::Reject => None,
            };
        }
        let rel = (x - self.lower_edge) / (self.upper_edge - self.lower_edge);
        let idx = (rel * self.bin_count as f64).floor() as usize;
        Some(idx.min(last))
    }
}

/// A probability mass function on a finite, strictly increasing support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretePmf {
    support: Vec<f64>,
    mass: Vec<f64>,
}

impl DiscretePmf {
    pub fn new(support: Vec<f64>, mass: Vec<f64>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::Empty("PMF support"));
        }
        if support.len() != mass.len() {
            return Err(Error::LengthMismatch {
                left: support.len(),
                right: mass.len(),
            });
        }
        if support.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidDistribution(
                "PMF support must be strictly increasing".into(),
            ));
        }
        if let Some((index, &value)) = mass
            .iter()
            .enumerate()
            .find(|(_, m)| !m.is_finite() || **m < 0.0)
        {
            return Err(Error::InvalidDistribution(format!(
                "mass[{index}] = {value} is not a nonnegative finite number"
            )));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!(
                "PMF mass sums to {total}, expected 1"
            )));
        }
        Ok(Self { support, mass })
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }
}

/// Counts per bin. Fails on the first out-of-range sample under the reject
/// policy.
pub(crate) fn bin_counts(samples: &[f64], spec: &HistogramSpec) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; spec.bin_count];
    for (index, &value) in samples.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index, value });
        }
        match spec.bin_index(value) {
            Some(bin) => counts[bin] += 1,
            None => {
                return Err(Error::OutOfRange {
                    index,
                    value,
                    lower: spec.lower_edge,
                    upper: spec.upper_edge,
                })
            }
        }
    }
    Ok(counts)
}

pub(crate) fn pmf_from_counts(counts: &[u64], spec: &HistogramSpec) -> Result<DiscretePmf> {
    let total: u64 = counts.iter().sum();
    let n = total as f64;
    let mass = counts.iter().map(|&c| c as f64 / n).collect();
    DiscretePmf::new(spec.centers(), mass)
}

/// Histogram of `samples` as a PMF whose support is the bin centers.
pub fn build_histogram(samples: &[f64], spec: &HistogramSpec) -> Result<DiscretePmf> {
    if samples.is_empty() {
        return Err(Error::Empty("histogram samples"));
    }
    let counts = bin_counts(samples, spec)?;
    pmf_from_counts(&counts, spec)
}
