//! Drift monitoring for detector embeddings.
//!
//! A reference set of embeddings (one fixed-dimensional vector per
//! utterance) is summarised per dimension in a [`ReferenceProfile`]. Incoming
//! test sets are scored against it by summing a univariate distance over
//! dimensions: Wasserstein-1, the Kolmogorov-Smirnov statistic, or KL
//! divergence. Scores over a sequence of test sets form a [`MonitorSeries`]
//! with optional alerting, and [`eval`] provides the equal error rate used to
//! judge the detector itself.
//!
//! ```
//! use driftwatch_core::{build_reference, drift_distance, DriftOptions, EmbeddingSet, MetricKind, ProfileOptions};
//!
//! let reference = EmbeddingSet::from_rows(&[[0.0, 1.0], [1.0, 2.0], [2.0, 3.0]], "dev").unwrap();
//! let profile = build_reference(&reference, &ProfileOptions::default()).unwrap();
//! let shifted = reference.map_values(|x| x + 0.5).unwrap();
//! let report = drift_distance(&profile, &shifted, MetricKind::Wasserstein1, &DriftOptions::default()).unwrap();
//! assert!((report.total() - 1.0).abs() < 1e-12);
//! ```

pub mod engine;
pub mod error;
pub mod eval;
pub mod io;
pub mod stats;
pub mod synth;

pub use engine::{
    build_reference, calibrate_threshold, drift_distance, drift_distances, metric_agreement, monitor,
    AgreementMatrix, Calibration, DriftOptions, DriftReport, EmbeddingSet, MonitorEntry, MonitorSeries,
    ProfileOptions, ReferenceProfile, ThresholdPolicy, ThresholdRule,
};
pub use error::{Error, Result};
pub use eval::{eer, pooled_eer, ScoreSet};
pub use stats::{
    build_empirical_cdf, build_histogram, kl_divergence, ks_statistic, merge_supports, min_max_normalize,
    pearson_correlation, wasserstein1, DiscretePmf, EdgePolicy, EmpiricalCdf, HistogramSpec, MetricKind,
};
pub use synth::{evolve_sequence, generate, simulate_finetune, Family, SynthSpec};
