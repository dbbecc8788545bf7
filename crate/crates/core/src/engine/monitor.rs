use serde::{Deserialize, Serialize};

use super::calibrate::{rank_quantile, self_drift_values, Calibration};
use super::drift::{drift_distances, DriftOptions, DriftReport};
use super::profile::ReferenceProfile;
use super::EmbeddingSet;
use crate::error::{Error, Result};
use crate::stats::{min_max_normalize, pearson_correlation, MetricKind};

/// How the alert threshold is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ThresholdRule {
    Absolute { value: f64 },
    Calibrated(Calibration),
}

/// Alert when `metric`'s total drift exceeds the threshold given by `rule`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPolicy {
    pub metric: MetricKind,
    pub rule: ThresholdRule,
}

impl ThresholdPolicy {
    pub fn absolute(metric: MetricKind, value: f64) -> Self {
        Self {
            metric,
            rule: ThresholdRule::Absolute { value },
        }
    }

    pub fn calibrated(metric: MetricKind, calibration: Calibration) -> Self {
        Self {
            metric,
            rule: ThresholdRule::Calibrated(calibration),
        }
    }

    fn validate(&self) -> Result<()> {
        match self.rule {
            ThresholdRule::Absolute { value } if !value.is_finite() => Err(Error::InvalidParameter(format!(
                "absolute threshold must be finite, got {value}"
            ))),
            ThresholdRule::Absolute { .. } => Ok(()),
            ThresholdRule::Calibrated(c) => c.validate(),
        }
    }

    /// Resolves the rule to a concrete threshold for `profile`.
    pub fn resolve(&self, profile: &ReferenceProfile, options: &DriftOptions) -> Result<f64> {
        self.validate()?;
        match self.rule {
            ThresholdRule::Absolute { value } => Ok(value),
            ThresholdRule::Calibrated(c) => {
                let values = self_drift_values(profile, self.metric, c.splits, c.seed, options)?;
                rank_quantile(&values, c.quantile)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonitorEntry {
    pub test_label: String,
    /// One report per monitored metric, in the series' metric order.
    pub reports: Vec<DriftReport>,
    pub alert: bool,
}

impl MonitorEntry {
    pub fn report(&self, metric: MetricKind) -> Option<&DriftReport> {
        self.reports.iter().find(|r| r.metric() == metric)
    }
}

/// Drift of an ordered sequence of test sets against one reference.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorSeries {
    metrics: Vec<MetricKind>,
    policy: Option<ThresholdPolicy>,
    threshold: Option<f64>,
    entries: Vec<MonitorEntry>,
}

fn check_metrics(metrics: &[MetricKind]) -> Result<()> {
    if metrics.is_empty() {
        return Err(Error::Empty("metric list"));
    }
    for (i, m) in metrics.iter().enumerate() {
        if metrics[..i].contains(m) {
            return Err(Error::InvalidParameter(format!("metric {m} listed twice")));
        }
    }
    Ok(())
}

impl MonitorSeries {
    /// Assembles a series, checking that reports line up with `metrics` and
    /// that every alert flag agrees with `threshold`.
    pub fn new(
        metrics: Vec<MetricKind>,
        policy: Option<ThresholdPolicy>,
        threshold: Option<f64>,
        entries: Vec<MonitorEntry>,
    ) -> Result<Self> {
        check_metrics(&metrics)?;
        if let Some(p) = &policy {
            p.validate()?;
        }
        match (&policy, threshold) {
            (Some(p), Some(t)) => {
                if !metrics.contains(&p.metric) {
                    return Err(Error::InvalidParameter(format!(
                        "threshold metric {} is not monitored",
                        p.metric
                    )));
                }
                if !t.is_finite() {
                    return Err(Error::InvalidParameter("threshold must be finite".into()));
                }
            }
            (None, None) => {}
            _ => {
                return Err(Error::InvalidParameter(
                    "threshold policy and resolved threshold must be given together".into(),
                ))
            }
        }
        for (i, entry) in entries.iter().enumerate() {
            let got: Vec<MetricKind> = entry.reports.iter().map(DriftReport::metric).collect();
            if got != metrics {
                return Err(Error::InvalidParameter(format!(
                    "entry {i} reports metrics {got:?}, expected {metrics:?}"
                )));
            }
            let expected = Self::alert_for(&metrics, policy.as_ref(), threshold, &entry.reports);
            if entry.alert != expected {
                return Err(Error::InvalidParameter(format!(
                    "entry {i} alert flag is inconsistent with the threshold"
                )));
            }
        }
        Ok(Self {
            metrics,
            policy,
            threshold,
            entries,
        })
    }

    fn alert_for(
        metrics: &[MetricKind],
        policy: Option<&ThresholdPolicy>,
        threshold: Option<f64>,
        reports: &[DriftReport],
    ) -> bool {
        match (policy, threshold) {
            (Some(p), Some(t)) => metrics
                .iter()
                .position(|&m| m == p.metric)
                .is_some_and(|i| reports[i].total() > t),
            _ => false,
        }
    }

    pub fn metrics(&self) -> &[MetricKind] {
        &self.metrics
    }

    pub fn policy(&self) -> Option<&ThresholdPolicy> {
        self.policy.as_ref()
    }

    /// The resolved alert threshold, if a policy was given.
    pub fn threshold(&self) -> Option<f64> {
        self.threshold
    }

    pub fn entries(&self) -> &[MonitorEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn any_alert(&self) -> bool {
        self.entries.iter().any(|e| e.alert)
    }

    /// Total drift per entry for `metric`, in submission order.
    pub fn totals(&self, metric: MetricKind) -> Option<Vec<f64>> {
        let i = self.metrics.iter().position(|&m| m == metric)?;
        Some(self.entries.iter().map(|e| e.reports[i].total()).collect())
    }
}

/// Computes drift for every test set and metric, and flags entries whose
/// policy-metric total exceeds the threshold.
pub fn monitor(
    profile: &ReferenceProfile,
    tests: &[EmbeddingSet],
    metrics: &[MetricKind],
    policy: Option<&ThresholdPolicy>,
    options: &DriftOptions,
) -> Result<MonitorSeries> {
    check_metrics(metrics)?;
    if let Some(p) = policy {
        if !metrics.contains(&p.metric) {
            return Err(Error::InvalidParameter(format!(
                "threshold metric {} is not monitored",
                p.metric
            )));
        }
    }
    if let Some(bad) = tests.iter().find(|t| t.dim() != profile.dim()) {
        return Err(Error::DimensionMismatch {
            expected: profile.dim(),
            found: bad.dim(),
        });
    }
    let threshold = policy.map(|p| p.resolve(profile, options)).transpose()?;
    let mut entries = Vec::with_capacity(tests.len());
    for test in tests {
        let reports = drift_distances(profile, test, metrics, options)?;
        let alert = MonitorSeries::alert_for(metrics, policy, threshold, &reports);
        entries.push(MonitorEntry {
            test_label: test.label().to_owned(),
            reports,
            alert,
        });
    }
    Ok(MonitorSeries {
        metrics: metrics.to_vec(),
        policy: policy.copied(),
        threshold,
        entries,
    })
}

/// Pairwise correlation of the metrics' min-max-normalized total-drift
/// curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementMatrix {
    pub metrics: Vec<MetricKind>,
    pub values: Vec<Vec<f64>>,
}

impl AgreementMatrix {
    pub fn get(&self, a: MetricKind, b: MetricKind) -> Option<f64> {
        let i = self.metrics.iter().position(|&m| m == a)?;
        let j = self.metrics.iter().position(|&m| m == b)?;
        Some(self.values[i][j])
    }

    /// Smallest off-diagonal entry.
    pub fn min_off_diagonal(&self) -> f64 {
        let mut min = f64::INFINITY;
        for (i, row) in self.values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if i != j {
                    min = min.min(v);
                }
            }
        }
        min
    }
}

pub fn metric_agreement(series: &MonitorSeries) -> Result<AgreementMatrix> {
    if series.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "metric agreement needs at least 2 entries, got {}",
            series.len()
        )));
    }
    if series.metrics.len() < 2 {
        return Err(Error::InvalidParameter(
            "metric agreement needs at least 2 metrics".into(),
        ));
    }
    let curves = series
        .metrics
        .iter()
        .map(|&m| min_max_normalize(&series.totals(m).expect("metric is in series")))
        .collect::<Result<Vec<_>>>()?;
    let k = curves.len();
    let mut values = vec![vec![1.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let r = pearson_correlation(&curves[i], &curves[j])?;
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    Ok(AgreementMatrix {
        metrics: series.metrics.clone(),
        values,
    })
}
