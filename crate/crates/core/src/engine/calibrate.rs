use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::drift::{column_distance, reduce_columns, DriftOptions};
use super::profile::{ProfileColumn, ReferenceProfile};
use crate::error::{Error, Result};
use crate::stats::MetricKind;

pub const DEFAULT_SPLITS: usize = 100;
pub const DEFAULT_QUANTILE: f64 = 0.99;

/// Settings for the half-vs-half self-drift null distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub splits: usize,
    pub quantile: f64,
    pub seed: u64,
}

impl Default for Calibration {
    fn default() -> Self {
        Self {
            splits: DEFAULT_SPLITS,
            quantile: DEFAULT_QUANTILE,
            seed: 0,
        }
    }
}

impl Calibration {
    pub(crate) fn validate(&self) -> Result<()> {
        if self.splits < 10 {
            return Err(Error::InvalidParameter(format!(
                "calibration needs at least 10 splits, got {}",
                self.splits
            )));
        }
        if !(self.quantile > 0.0 && self.quantile < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "quantile must lie in (0, 1), got {}",
                self.quantile
            )));
        }
        Ok(())
    }
}

/// Nearest-rank quantile: the `ceil(q * n)`-th smallest value.
pub fn rank_quantile(values: &[f64], quantile: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Empty("quantile values"));
    }
    if !(quantile > 0.0 && quantile < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "quantile must lie in (0, 1), got {quantile}"
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = (quantile * sorted.len() as f64).ceil() as usize;
    Ok(sorted[rank.clamp(1, sorted.len()) - 1])
}

/// Splits `column` into the samples whose row is in the first half and the
/// rest. Both outputs stay sorted.
fn split_column(column: &ProfileColumn, in_first: &[bool]) -> (Vec<f64>, Vec<f64>) {
    let mut first = Vec::with_capacity(column.sorted.len() / 2 + 1);
    let mut second = Vec::with_capacity(column.sorted.len() / 2 + 1);
    for (&x, &row) in column.sorted.iter().zip(&column.order) {
        if in_first[row as usize] {
            first.push(x);
        } else {
            second.push(x);
        }
    }
    (first, second)
}

/// Total drift of one random half of the reference rows against the other
/// half, once per split. The first half acts as the reference, with
/// histogram edges taken from its own range.
pub fn self_drift_values(
    profile: &ReferenceProfile,
    metric: MetricKind,
    splits: usize,
    seed: u64,
    options: &DriftOptions,
) -> Result<Vec<f64>> {
    let n = profile.row_count();
    if n < 4 {
        return Err(Error::InvalidParameter(format!(
            "calibration needs at least 4 reference rows, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<usize> = (0..n).collect();
    let mut in_first = vec![false; n];
    let mut values = Vec::with_capacity(splits);
    for _ in 0..splits {
        rows.shuffle(&mut rng);
        for (k, &r) in rows.iter().enumerate() {
            in_first[r] = k < n / 2;
        }
        let reduced = reduce_columns(profile.dim(), &[metric], |d| {
            let (first, second) = split_column(profile.column(d), &in_first);
            let half_ref = ProfileColumn::from_sorted(first, Vec::new(), profile.bin_count())?;
            Ok(vec![column_distance(&half_ref, &second, metric, options.smoothing)?])
        })?;
        values.push(reduced[0].1);
    }
    Ok(values)
}

/// Runs the self-drift calibration, stores the values on the profile and
/// returns the requested quantile as an alert threshold.
pub fn calibrate_threshold(
    profile: &mut ReferenceProfile,
    metric: MetricKind,
    calibration: &Calibration,
    options: &DriftOptions,
) -> Result<f64> {
    calibration.validate()?;
    let values = self_drift_values(profile, metric, calibration.splits, calibration.seed, options)?;
    let threshold = rank_quantile(&values, calibration.quantile)?;
    profile.set_calibration(metric, values);
    Ok(threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{build_reference, EmbeddingSet, ProfileOptions};

    #[test]
    fn nearest_rank() {
        let v = [5.0, 1.0, 4.0, 2.0, 3.0];
        assert_eq!(rank_quantile(&v, 0.2).unwrap(), 1.0);
        assert_eq!(rank_quantile(&v, 0.21).unwrap(), 2.0);
        assert_eq!(rank_quantile(&v, 0.5).unwrap(), 3.0);
        assert_eq!(rank_quantile(&v, 0.99).unwrap(), 5.0);
        assert!(rank_quantile(&v, 1.0).is_err());
        assert!(rank_quantile(&[], 0.5).is_err());
    }

    #[test]
    fn identical_rows_calibrate_to_zero() {
        let set = EmbeddingSet::from_rows(&vec![[1.5, -0.5]; 12], "flat").unwrap();
        let mut profile = build_reference(&set, &ProfileOptions::default()).unwrap();
        for metric in MetricKind::ALL {
            let t = calibrate_threshold(&mut profile, metric, &Calibration::default(), &DriftOptions::default())
                .unwrap();
            assert_eq!(t, 0.0);
            assert!(profile.self_drift_calibration(metric).unwrap().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn parameter_checks() {
        let set = EmbeddingSet::from_rows(&[[1.0], [2.0], [3.0]], "").unwrap();
        let mut profile = build_reference(&set, &ProfileOptions::default()).unwrap();
        let c = Calibration::default();
        assert!(calibrate_threshold(&mut profile, MetricKind::Wasserstein1, &c, &DriftOptions::default()).is_err());

        let set = EmbeddingSet::from_rows(&[[1.0], [2.0], [3.0], [4.0]], "").unwrap();
        let mut profile = build_reference(&set, &ProfileOptions::default()).unwrap();
        let few = Calibration { splits: 9, ..c };
        assert!(calibrate_threshold(&mut profile, MetricKind::Wasserstein1, &few, &DriftOptions::default()).is_err());
        let bad_q = Calibration { quantile: 1.5, ..c };
        assert!(calibrate_threshold(&mut profile, MetricKind::Wasserstein1, &bad_q, &DriftOptions::default()).is_err());
        assert!(calibrate_threshold(&mut profile, MetricKind::Wasserstein1, &c, &DriftOptions::default()).is_ok());
    }
}
