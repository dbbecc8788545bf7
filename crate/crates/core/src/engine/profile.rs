use std::collections::BTreeMap;

use rayon::prelude::*;

use super::EmbeddingSet;
use crate::error::{Error, Result};
use crate::stats::{bin_counts, pmf_from_counts, DiscretePmf, EdgePolicy, HistogramSpec, MetricKind};

pub const DEFAULT_BIN_COUNT: usize = 100;

/// Minimum histogram width used when a reference dimension is constant.
const DEGENERATE_WIDTH: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileOptions {
    pub bin_count: usize,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            bin_count: DEFAULT_BIN_COUNT,
        }
    }
}

/// One reference dimension: its sorted samples, the row each sample came
/// from, and a histogram over the dimension's own range.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileColumn {
    pub(crate) sorted: Vec<f64>,
    pub(crate) order: Vec<u32>,
    pub(crate) spec: HistogramSpec,
    pub(crate) histogram: DiscretePmf,
}

impl ProfileColumn {
    /// `sorted` must be nonempty, finite and ascending.
    pub(crate) fn from_sorted(sorted: Vec<f64>, order: Vec<u32>, bin_count: usize) -> Result<Self> {
        let spec = range_spec(sorted[0], sorted[sorted.len() - 1], bin_count)?;
        let counts = bin_counts(&sorted, &spec)?;
        let histogram = pmf_from_counts(&counts, &spec)?;
        Ok(Self {
            sorted,
            order,
            spec,
            histogram,
        })
    }

    pub(crate) fn from_parts(sorted: Vec<f64>, order: Vec<u32>, spec: HistogramSpec, histogram: DiscretePmf) -> Self {
        Self {
            sorted,
            order,
            spec,
            histogram,
        }
    }

    pub fn sorted_samples(&self) -> &[f64] {
        &self.sorted
    }

    /// Row index of each entry of [`sorted_samples`](Self::sorted_samples).
    pub fn row_order(&self) -> &[u32] {
        &self.order
    }

    pub fn histogram_spec(&self) -> &HistogramSpec {
        &self.spec
    }

    pub fn histogram(&self) -> &DiscretePmf {
        &self.histogram
    }
}

/// Histogram spec spanning `[min, max]`, widened around the value when the
/// range is degenerate.
pub(crate) fn range_spec(min: f64, max: f64, bin_count: usize) -> Result<HistogramSpec> {
    let (lo, hi) = if min < max {
        (min, max)
    } else {
        // keep bin centers distinguishable for large magnitudes
        let half = (DEGENERATE_WIDTH / 2.0).max(min.abs() * 1e-12);
        (min - half, min + half)
    };
    HistogramSpec::new(bin_count, lo, hi, EdgePolicy::Clamp)
}

/// Sorted values of one column together with their source rows. Ties keep
/// row order.
pub(crate) fn sorted_column(set: &EmbeddingSet, d: usize) -> (Vec<f64>, Vec<u32>) {
    let column = set.column(d);
    let mut order: Vec<u32> = (0..column.len() as u32).collect();
    order.sort_by(|&a, &b| column[a as usize].total_cmp(&column[b as usize]));
    let sorted = order.iter().map(|&i| column[i as usize]).collect();
    (sorted, order)
}

/// Per-dimension summary of a reference embedding set.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceProfile {
    pub(crate) id: String,
    pub(crate) row_count: usize,
    pub(crate) bin_count: usize,
    pub(crate) columns: Vec<ProfileColumn>,
    pub(crate) calibration: BTreeMap<MetricKind, Vec<f64>>,
}

impl ReferenceProfile {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn bin_count(&self) -> usize {
        self.bin_count
    }

    pub fn columns(&self) -> &[ProfileColumn] {
        &self.columns
    }

    pub fn column(&self, d: usize) -> &ProfileColumn {
        &self.columns[d]
    }

    /// Half-vs-half self-drift values stored by the last calibration for
    /// `metric`.
    pub fn self_drift_calibration(&self, metric: MetricKind) -> Option<&[f64]> {
        self.calibration.get(&metric).map(Vec::as_slice)
    }

    pub fn calibrations(&self) -> impl Iterator<Item = (MetricKind, &[f64])> {
        self.calibration.iter().map(|(&m, v)| (m, v.as_slice()))
    }

    pub(crate) fn set_calibration(&mut self, metric: MetricKind, values: Vec<f64>) {
        self.calibration.insert(metric, values);
    }

    /// Reassembles a profile from stored parts, checking every invariant.
    pub(crate) fn from_parts(
        id: String,
        row_count: usize,
        bin_count: usize,
        columns: Vec<ProfileColumn>,
        calibration: BTreeMap<MetricKind, Vec<f64>>,
    ) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::Empty("profile dimensions"));
        }
        for (d, col) in columns.iter().enumerate() {
            let bad = |what: &str| Error::InvalidDistribution(format!("profile dimension {d}: {what}"));
            if col.sorted.len() != row_count || col.order.len() != row_count {
                return Err(bad("sample count does not match row count"));
            }
            if col.sorted.windows(2).any(|w| !(w[0] <= w[1])) {
                return Err(bad("samples are not sorted"));
            }
            let mut seen = vec![false; row_count];
            for &r in &col.order {
                match seen.get_mut(r as usize) {
                    Some(s) if !*s => *s = true,
                    _ => return Err(bad("row order is not a permutation")),
                }
            }
            if col.spec.bin_count() != bin_count || col.histogram.support() != col.spec.centers() {
                return Err(bad("histogram does not match its spec"));
            }
        }
        if calibration.values().flatten().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidDistribution(
                "calibration values must be nonnegative".into(),
            ));
        }
        Ok(Self {
            id,
            row_count,
            bin_count,
            columns,
            calibration,
        })
    }
}

/// Builds a reference profile: per dimension, the sorted samples and a
/// histogram whose edges are that dimension's min and max.
pub fn build_reference(embeddings: &EmbeddingSet, options: &ProfileOptions) -> Result<ReferenceProfile> {
    if embeddings.is_empty() {
        return Err(Error::Empty("reference embeddings"));
    }
    if embeddings.len() > u32::MAX as usize {
        return Err(Error::InvalidParameter("reference has too many rows".into()));
    }
    // validates bin_count up front
    HistogramSpec::new(options.bin_count, 0.0, 1.0, EdgePolicy::Clamp)?;

    let columns = (0..embeddings.dim())
        .into_par_iter()
        .map(|d| {
            let (sorted, order) = sorted_column(embeddings, d);
            ProfileColumn::from_sorted(sorted, order, options.bin_count)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ReferenceProfile {
        id: embeddings.label().to_owned(),
        row_count: embeddings.len(),
        bin_count: options.bin_count,
        columns,
        calibration: BTreeMap::new(),
    })
}
