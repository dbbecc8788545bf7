//! Drift scores over embedding sets.
//!
//! A [`ReferenceProfile`] summarises each dimension of a trusted embedding
//! set. A test set's drift is the sum over dimensions of a univariate
//! distance between its marginal and the reference marginal. Per-dimension
//! work runs on the current rayon pool; totals are always reduced in
//! ascending dimension order, so results do not depend on the thread count.
//!
//! The engine does not look at class labels: callers pass embeddings that
//! are already restricted to the class being monitored.

mod calibrate;
mod drift;
mod embedding;
mod monitor;
mod profile;

pub use calibrate::{
    calibrate_threshold, rank_quantile, self_drift_values, Calibration, DEFAULT_QUANTILE, DEFAULT_SPLITS,
};
pub use drift::{drift_distance, drift_distances, DriftOptions, DriftReport, DEFAULT_SMOOTHING};
pub use embedding::EmbeddingSet;
pub use monitor::{
    metric_agreement, monitor, AgreementMatrix, MonitorEntry, MonitorSeries, ThresholdPolicy, ThresholdRule,
};
pub use profile::{build_reference, ProfileColumn, ProfileOptions, ReferenceProfile, DEFAULT_BIN_COUNT};
