//! JSON report documents for single drift reports and monitor series.
//!
//! Both kinds carry `schema_version` and `kind` (`"drift-report"` or
//! `"monitor-series"`). Floats are written in shortest round-trip form, so
//! parse followed by serialize reproduces the document exactly.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::FormatError;
use crate::engine::{DriftReport, MonitorEntry, MonitorSeries, ThresholdPolicy};
use crate::error::Result;
use crate::stats::MetricKind;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

const KIND_REPORT: &str = "drift-report";
const KIND_SERIES: &str = "monitor-series";

#[derive(Debug, Clone, PartialEq)]
pub enum ReportBody {
    Drift(DriftReport),
    Series(MonitorSeries),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportDocument {
    pub timestamp: Option<String>,
    pub body: ReportBody,
}

impl ReportDocument {
    pub fn drift(report: DriftReport) -> Self {
        Self {
            timestamp: None,
            body: ReportBody::Drift(report),
        }
    }

    pub fn series(series: MonitorSeries) -> Self {
        Self {
            timestamp: None,
            body: ReportBody::Series(series),
        }
    }

    pub fn with_timestamp(mut self, timestamp: Option<String>) -> Self {
        self.timestamp = timestamp;
        self
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportWire {
    metric: MetricKind,
    total: f64,
    per_dim: Vec<f64>,
    test_label: String,
    ref_id: String,
    test_count: usize,
    ref_count: usize,
}

impl From<&DriftReport> for ReportWire {
    fn from(r: &DriftReport) -> Self {
        Self {
            metric: r.metric(),
            total: r.total(),
            per_dim: r.per_dim().to_vec(),
            test_label: r.test_label().to_owned(),
            ref_id: r.ref_id().to_owned(),
            test_count: r.test_count(),
            ref_count: r.ref_count(),
        }
    }
}

impl ReportWire {
    fn into_report(self) -> Result<DriftReport> {
        DriftReport::new(
            self.metric,
            self.per_dim,
            self.total,
            self.test_label,
            self.ref_id,
            self.test_count,
            self.ref_count,
        )
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportDocWire {
    schema_version: u32,
    kind: String,
    timestamp: Option<String>,
    metric: MetricKind,
    total: f64,
    per_dim: Vec<f64>,
    test_label: String,
    ref_id: String,
    test_count: usize,
    ref_count: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryWire {
    test_label: String,
    alert: bool,
    reports: Vec<ReportWire>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesDocWire {
    schema_version: u32,
    kind: String,
    timestamp: Option<String>,
    metrics: Vec<MetricKind>,
    policy: Option<ThresholdPolicy>,
    threshold: Option<f64>,
    entries: Vec<EntryWire>,
}

/// Serializes a document as pretty-printed JSON with a trailing newline.
pub fn save_report(doc: &ReportDocument) -> String {
    let timestamp = doc.timestamp.clone();
    let mut text = match &doc.body {
        ReportBody::Drift(r) => serde_json::to_string_pretty(&ReportDocWire {
            schema_version: REPORT_SCHEMA_VERSION,
            kind: KIND_REPORT.into(),
            timestamp,
            metric: r.metric(),
            total: r.total(),
            per_dim: r.per_dim().to_vec(),
            test_label: r.test_label().to_owned(),
            ref_id: r.ref_id().to_owned(),
            test_count: r.test_count(),
            ref_count: r.ref_count(),
        }),
        ReportBody::Series(series) => serde_json::to_string_pretty(&SeriesDocWire {
            schema_version: REPORT_SCHEMA_VERSION,
            kind: KIND_SERIES.into(),
            timestamp,
            metrics: series.metrics().to_vec(),
            policy: series.policy().copied(),
            threshold: series.threshold(),
            entries: series
                .entries()
                .iter()
                .map(|e| EntryWire {
                    test_label: e.test_label.clone(),
                    alert: e.alert,
                    reports: e.reports.iter().map(ReportWire::from).collect(),
                })
                .collect(),
        }),
    }
    .expect("report documents hold only finite numbers");
    text.push('\n');
    text
}

fn invalid(e: impl std::fmt::Display) -> FormatError {
    FormatError::InvalidDocument(e.to_string())
}

/// Parses and validates a report document of either kind.
pub fn load_report(text: &str) -> Result<ReportDocument> {
    let value: Value = serde_json::from_str(text).map_err(|e| FormatError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let version = value.get("schema_version");
    if version.and_then(Value::as_u64) != Some(REPORT_SCHEMA_VERSION as u64) {
        return Err(FormatError::SchemaMismatch {
            expected: REPORT_SCHEMA_VERSION,
            found: version.map_or_else(|| "missing".to_owned(), Value::to_string),
        }
        .into());
    }
    let kind = value.get("kind").and_then(Value::as_str).unwrap_or("").to_owned();
    match kind.as_str() {
        KIND_REPORT => {
            let wire: ReportDocWire = serde_json::from_value(value).map_err(invalid)?;
            let report = DriftReport::new(
                wire.metric,
                wire.per_dim,
                wire.total,
                wire.test_label,
                wire.ref_id,
                wire.test_count,
                wire.ref_count,
            )
            .map_err(invalid)?;
            Ok(ReportDocument {
                timestamp: wire.timestamp,
                body: ReportBody::Drift(report),
            })
        }
        KIND_SERIES => {
            let wire: SeriesDocWire = serde_json::from_value(value).map_err(invalid)?;
            let entries = wire
                .entries
                .into_iter()
                .map(|e| {
                    Ok(MonitorEntry {
                        test_label: e.test_label,
                        alert: e.alert,
                        reports: e
                            .reports
                            .into_iter()
                            .map(ReportWire::into_report)
                            .collect::<Result<Vec<_>>>()?,
                    })
                })
                .collect::<Result<Vec<_>>>()
                .map_err(invalid)?;
            let series = MonitorSeries::new(wire.metrics, wire.policy, wire.threshold, entries).map_err(invalid)?;
            Ok(ReportDocument {
                timestamp: wire.timestamp,
                body: ReportBody::Series(series),
            })
        }
        _ => Err(FormatError::UnknownKind {
            expected: "drift-report, monitor-series",
            found: kind,
        }
        .into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{Calibration, ThresholdPolicy};
    use crate::error::Error;

    fn report(total_parts: &[f64], label: &str) -> DriftReport {
        let total = total_parts.iter().sum();
        DriftReport::new(
            MetricKind::Wasserstein1,
            total_parts.to_vec(),
            total,
            label.into(),
            "ref".into(),
            10,
            20,
        )
        .unwrap()
    }

    #[test]
    fn drift_report_round_trip() {
        let doc = ReportDocument::drift(report(&[0.1, 0.2, 1.0 / 3.0], "t\"1"))
            .with_timestamp(Some("2024-01-01T00:00:00Z".into()));
        let text = save_report(&doc);
        let back = load_report(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(save_report(&back), text);
    }

    #[test]
    fn empty_series_document() {
        let series = MonitorSeries::new(vec![MetricKind::Wasserstein1], None, None, vec![]).unwrap();
        let text = save_report(&ReportDocument::series(series));
        let value: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["entries"], Value::Array(vec![]));
        assert_eq!(value["kind"], "monitor-series");
        assert!(load_report(&text).is_ok());
    }

    #[test]
    fn series_round_trip() {
        let policy = ThresholdPolicy::calibrated(MetricKind::Wasserstein1, Calibration { seed: 7, ..Default::default() });
        let entries = vec![
            MonitorEntry {
                test_label: "a".into(),
                reports: vec![report(&[0.5], "a")],
                alert: false,
            },
            MonitorEntry {
                test_label: "b".into(),
                reports: vec![report(&[1.5], "b")],
                alert: true,
            },
        ];
        let series = MonitorSeries::new(vec![MetricKind::Wasserstein1], Some(policy), Some(1.0), entries).unwrap();
        let doc = ReportDocument::series(series);
        let text = save_report(&doc);
        assert_eq!(load_report(&text).unwrap(), doc);
    }

    #[test]
    fn sum_mismatch_is_rejected() {
        let text = save_report(&ReportDocument::drift(report(&[1.0, 2.0], "t")));
        let tampered = text.replace("\"total\": 3.0", "\"total\": 3.5");
        assert_ne!(tampered, text);
        assert!(matches!(load_report(&tampered), Err(Error::Format(FormatError::InvalidDocument(_)))));
    }

    #[test]
    fn schema_and_syntax_errors() {
        let text = save_report(&ReportDocument::drift(report(&[1.0], "t")));
        let v2 = text.replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(matches!(load_report(&v2), Err(Error::Format(FormatError::SchemaMismatch { .. }))));
        let kind = text.replace("drift-report", "something");
        assert!(matches!(load_report(&kind), Err(Error::Format(FormatError::UnknownKind { .. }))));
        let truncated = &text[..text.len() / 2];
        assert!(matches!(load_report(truncated), Err(Error::Format(FormatError::Syntax { .. }))));
    }
}
