use rayon::prelude::*;

use super::profile::{sorted_column, ProfileColumn, ReferenceProfile};
use super::EmbeddingSet;
use crate::error::{Error, Result};
use crate::stats::{
    bin_counts, kl_divergence, ks_statistic, pmf_from_counts, wasserstein1, EdgePolicy, EmpiricalCdf,
    MetricKind,
};

pub const DEFAULT_SMOOTHING: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftOptions {
    /// Per-bin mass added to both histograms before KL divergence.
    pub smoothing: f64,
}

impl Default for DriftOptions {
    fn default() -> Self {
        Self {
            smoothing: DEFAULT_SMOOTHING,
        }
    }
}

impl DriftOptions {
    fn validate(&self) -> Result<()> {
        if !(self.smoothing >= 0.0) || !self.smoothing.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "smoothing must be a nonnegative finite number, got {}",
                self.smoothing
            )));
        }
        Ok(())
    }
}

/// Drift of one test set against one reference under one metric.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftReport {
    metric: MetricKind,
    per_dim: Vec<f64>,
    total: f64,
    test_label: String,
    ref_id: String,
    test_count: usize,
    ref_count: usize,
}

impl DriftReport {
    /// Checks that every per-dimension value is nonnegative and that
    /// `total` equals their sum within `1e-9 * dim`.
    pub fn new(
        metric: MetricKind,
        per_dim: Vec<f64>,
        total: f64,
        test_label: String,
        ref_id: String,
        test_count: usize,
        ref_count: usize,
    ) -> Result<Self> {
        if per_dim.is_empty() {
            return Err(Error::Empty("per-dimension drift"));
        }
        if let Some((index, &value)) = per_dim
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidDistribution(format!(
                "per_dim[{index}] = {value} is not a nonnegative distance"
            )));
        }
        let sum: f64 = per_dim.iter().sum();
        if !(total >= 0.0) || (total - sum).abs() > 1e-9 * per_dim.len() as f64 {
            return Err(Error::InvalidDistribution(format!(
                "total {total} does not match per-dimension sum {sum}"
            )));
        }
        Ok(Self {
            metric,
            per_dim,
            total,
            test_label,
            ref_id,
            test_count,
            ref_count,
        })
    }

    pub fn metric(&self) -> MetricKind {
        self.metric
    }

    pub fn per_dim(&self) -> &[f64] {
        &self.per_dim
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn test_label(&self) -> &str {
        &self.test_label
    }

    pub fn ref_id(&self) -> &str {
        &self.ref_id
    }

    pub fn test_count(&self) -> usize {
        self.test_count
    }

    pub fn ref_count(&self) -> usize {
        self.ref_count
    }
}

/// Distance between one reference column and a sorted test column.
///
/// CDF metrics compare exact empirical CDFs. KL divergence bins the test
/// samples with the reference edges (clamping out-of-range values) and
/// returns `D(test || reference)`.
pub(crate) fn column_distance(
    reference: &ProfileColumn,
    test_sorted: &[f64],
    metric: MetricKind,
    smoothing: f64,
) -> Result<f64> {
    Ok(match metric {
        MetricKind::Wasserstein1 => wasserstein1(
            &EmpiricalCdf::from_sorted(test_sorted),
            &EmpiricalCdf::from_sorted(&reference.sorted),
        ),
        MetricKind::KolmogorovSmirnov => ks_statistic(
            &EmpiricalCdf::from_sorted(test_sorted),
            &EmpiricalCdf::from_sorted(&reference.sorted),
        ),
        MetricKind::KullbackLeibler => {
            let spec = reference.spec.with_policy(EdgePolicy::Clamp);
            let test_hist = pmf_from_counts(&bin_counts(test_sorted, &spec)?, &spec)?;
            kl_divergence(&test_hist, &reference.histogram, smoothing)?
        }
    })
}

/// Computes one value per (dimension, metric) with `per_column`, then sums
/// each metric's values in ascending dimension order regardless of how the
/// columns were scheduled.
pub(crate) fn reduce_columns<F>(dim: usize, metrics: &[MetricKind], per_column: F) -> Result<Vec<(Vec<f64>, f64)>>
where
    F: Fn(usize) -> Result<Vec<f64>> + Sync,
{
    let values = (0..dim)
        .into_par_iter()
        .map(&per_column)
        .collect::<Result<Vec<_>>>()?;
    Ok((0..metrics.len())
        .map(|m| {
            let per_dim: Vec<f64> = values.iter().map(|v| v[m]).collect();
            let total = per_dim.iter().fold(0.0, |acc, &x| acc + x);
            (per_dim, total)
        })
        .collect())
}

/// Drift reports for several metrics at once; each test column is sorted
/// only once.
pub fn drift_distances(
    profile: &ReferenceProfile,
    test: &EmbeddingSet,
    metrics: &[MetricKind],
    options: &DriftOptions,
) -> Result<Vec<DriftReport>> {
    options.validate()?;
    if test.is_empty() {
        return Err(Error::Empty("test embeddings"));
    }
    if test.dim() != profile.dim() {
        return Err(Error::DimensionMismatch {
            expected: profile.dim(),
            found: test.dim(),
        });
    }
    let reduced = reduce_columns(profile.dim(), metrics, |d| {
        let (sorted, _) = sorted_column(test, d);
        metrics
            .iter()
            .map(|&m| column_distance(profile.column(d), &sorted, m, options.smoothing))
            .collect()
    })?;
    Ok(metrics
        .iter()
        .zip(reduced)
        .map(|(&metric, (per_dim, total))| DriftReport {
            metric,
            per_dim,
            total,
            test_label: test.label().to_owned(),
            ref_id: profile.id().to_owned(),
            test_count: test.len(),
            ref_count: profile.row_count(),
        })
        .collect())
}

/// Drift score of `test` against `profile`: the unweighted sum over
/// dimensions of the per-dimension distance.
pub fn drift_distance(
    profile: &ReferenceProfile,
    test: &EmbeddingSet,
    metric: MetricKind,
    options: &DriftOptions,
) -> Result<DriftReport> {
    Ok(drift_distances(profile, test, &[metric], options)?.remove(0))
}
