//! Binary reference profiles.
//!
//! ```text
//! magic "DRFP" | version u32 | dim u32 | rows u64 | bins u32 | id_len u32 | id (UTF-8)
//! per dimension:
//!     lower_edge f64 | upper_edge f64
//!     sorted samples  rows x f64
//!     row order       rows x u32
//!     histogram mass  bins x f64
//! calibration_count u32
//! per calibration: metric tag u8 | len u32 | len x f64
//! ```
//!
//! All values little-endian. Loading re-derives every histogram from the
//! stored samples and rejects the file if it disagrees with the stored mass.

use std::collections::BTreeMap;

use super::bytes::ByteReader;
use super::FormatError;
use crate::engine::{ProfileColumn, ReferenceProfile};
use crate::error::Result;
use crate::stats::{DiscretePmf, EdgePolicy, HistogramSpec, MetricKind};

pub const PROFILE_MAGIC: [u8; 4] = *b"DRFP";
pub const PROFILE_VERSION: u32 = 1;

pub fn save_profile(profile: &ReferenceProfile) -> Vec<u8> {
    let rows = profile.row_count();
    let bins = profile.bin_count();
    let mut out = Vec::with_capacity(32 + profile.dim() * (rows * 12 + bins * 8 + 16));
    out.extend_from_slice(&PROFILE_MAGIC);
    out.extend_from_slice(&PROFILE_VERSION.to_le_bytes());
    out.extend_from_slice(&(profile.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(rows as u64).to_le_bytes());
    out.extend_from_slice(&(bins as u32).to_le_bytes());
    out.extend_from_slice(&(profile.id().len() as u32).to_le_bytes());
    out.extend_from_slice(profile.id().as_bytes());
    for col in profile.columns() {
        out.extend_from_slice(&col.histogram_spec().lower_edge().to_le_bytes());
        out.extend_from_slice(&col.histogram_spec().upper_edge().to_le_bytes());
        for v in col.sorted_samples() {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for r in col.row_order() {
            out.extend_from_slice(&r.to_le_bytes());
        }
        for m in col.histogram().mass() {
            out.extend_from_slice(&m.to_le_bytes());
        }
    }
    let calibrations: Vec<_> = profile.calibrations().collect();
    out.extend_from_slice(&(calibrations.len() as u32).to_le_bytes());
    for (metric, values) in calibrations {
        out.push(metric.tag());
        out.extend_from_slice(&(values.len() as u32).to_le_bytes());
        for v in values {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

fn invalid(offset: u64, field: &'static str, reason: impl Into<String>) -> FormatError {
    FormatError::InvalidField {
        offset,
        field,
        reason: reason.into(),
    }
}

pub fn load_profile(bytes: &[u8]) -> Result<ReferenceProfile> {
    let mut r = ByteReader::new(bytes);
    r.magic(&PROFILE_MAGIC)?;
    let version = r.u32()?;
    if version != PROFILE_VERSION {
        return Err(FormatError::UnsupportedVersion { offset: 4, version }.into());
    }
    let dim = r.u32()? as usize;
    if dim == 0 {
        return Err(invalid(8, "dimension", "must be positive").into());
    }
    let rows = r.u64()?;
    if rows == 0 || rows > u32::MAX as u64 {
        return Err(invalid(12, "row count", format!("{rows} is out of range")).into());
    }
    let rows = rows as usize;
    let bins = r.u32()? as usize;
    let id_len = r.u32()? as usize;
    let id_offset = r.offset();
    let id = std::str::from_utf8(r.take(id_len)?)
        .map_err(|e| FormatError::InvalidUtf8 {
            offset: id_offset + e.valid_up_to() as u64,
        })?
        .to_owned();

    // the whole column block must be present before allocating for it
    let per_column = 16 + rows as u64 * 12 + bins as u64 * 8;
    r.require(per_column.saturating_mul(dim as u64))?;

    let mut columns = Vec::with_capacity(dim);
    for _ in 0..dim {
        let edges_offset = r.offset();
        let lower = r.finite_f64()?;
        let upper = r.finite_f64()?;
        let spec = HistogramSpec::new(bins, lower, upper, EdgePolicy::Clamp)
            .map_err(|e| invalid(edges_offset, "histogram spec", e.to_string()))?;
        let samples_offset = r.offset();
        let sorted = (0..rows).map(|_| r.finite_f64()).collect::<Result<Vec<_>, _>>()?;
        let order = (0..rows).map(|_| r.u32()).collect::<Result<Vec<_>, _>>()?;
        let mass_offset = r.offset();
        let mass = (0..bins).map(|_| r.finite_f64()).collect::<Result<Vec<_>, _>>()?;
        let histogram = DiscretePmf::new(spec.centers(), mass)
            .map_err(|e| invalid(mass_offset, "histogram mass", e.to_string()))?;
        if sorted.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid(samples_offset, "sorted samples", "not in ascending order").into());
        }
        let recomputed = crate::stats::build_histogram(&sorted, &spec)
            .map_err(|e| invalid(samples_offset, "sorted samples", e.to_string()))?;
        if recomputed != histogram {
            return Err(invalid(mass_offset, "histogram mass", "does not match the stored samples").into());
        }
        columns.push(ProfileColumn::from_parts(sorted, order, spec, histogram));
    }

    let count = r.u32()?;
    let mut calibration = BTreeMap::new();
    for _ in 0..count {
        let tag_offset = r.offset();
        let tag = r.u8()?;
        let metric = MetricKind::from_tag(tag)
            .ok_or_else(|| invalid(tag_offset, "metric tag", format!("unknown tag {tag}")))?;
        let len = r.u32()? as u64;
        r.require(len * 8)?;
        let values = (0..len).map(|_| r.finite_f64()).collect::<Result<Vec<_>, _>>()?;
        if calibration.insert(metric, values).is_some() {
            return Err(invalid(tag_offset, "metric tag", format!("{metric} calibrated twice")).into());
        }
    }
    r.finish()?;

    ReferenceProfile::from_parts(id, rows, bins, columns, calibration)
        .map_err(|e| FormatError::InvalidDocument(e.to_string()).into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{build_reference, calibrate_threshold, Calibration, DriftOptions, EmbeddingSet, ProfileOptions};
    use crate::error::Error;

    fn profile() -> ReferenceProfile {
        let set = EmbeddingSet::from_rows(
            &[[0.0, 5.0], [1.0, 5.0], [0.5, 5.0], [2.0, 5.0], [1.5, 5.0]],
            "ref-α",
        )
        .unwrap();
        let mut p = build_reference(&set, &ProfileOptions { bin_count: 8 }).unwrap();
        calibrate_threshold(&mut p, MetricKind::KolmogorovSmirnov, &Calibration::default(), &DriftOptions::default())
            .unwrap();
        p
    }

    #[test]
    fn round_trip() {
        let p = profile();
        let bytes = save_profile(&p);
        let back = load_profile(&bytes).unwrap();
        assert_eq!(back, p);
        assert_eq!(save_profile(&back), bytes);
    }

    #[test]
    fn corruption_is_reported() {
        let bytes = save_profile(&profile());
        let mut magic = bytes.clone();
        magic[1] = b'X';
        assert!(matches!(load_profile(&magic), Err(Error::Format(FormatError::BadMagic { .. }))));

        for cut in [3, 10, 30, bytes.len() - 1] {
            assert!(
                matches!(load_profile(&bytes[..cut]), Err(Error::Format(FormatError::Truncated { .. }))),
                "cut at {cut}"
            );
        }

        // first sample of dimension 0
        let first_sample = 4 + 4 + 4 + 8 + 4 + 4 + "ref-α".len() + 16;
        let mut unsorted = bytes.clone();
        unsorted[first_sample..first_sample + 8].copy_from_slice(&9.0f64.to_le_bytes());
        assert!(matches!(load_profile(&unsorted), Err(Error::Format(FormatError::InvalidField { .. }))));

        let mut trailing = bytes.clone();
        trailing.push(1);
        assert!(matches!(load_profile(&trailing), Err(Error::Format(FormatError::TrailingBytes { .. }))));
    }
}
