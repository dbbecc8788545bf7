use crate::error::{Error, Result};

/// Rescales `series` onto `[0, 1]`. A constant series maps to all zeros.
pub fn min_max_normalize(series: &[f64]) -> Result<Vec<f64>> {
    if series.is_empty() {
        return Err(Error::Empty("series"));
    }
    if let Some((index, &value)) = series.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { index, value });
    }
    let min = series.iter().copied().fold(f64::INFINITY, f64::min);
    let max = series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    if range == 0.0 {
        return Ok(vec![0.0; series.len()]);
    }
    Ok(series.iter().map(|&x| (x - min) / range).collect())
}

/// Sample Pearson correlation, accumulated in a single pass with running
/// co-moments.
pub fn pearson_correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "correlation needs at least 2 points, got {}",
            a.len()
        )));
    }
    let (mut mean_a, mut mean_b) = (0.0, 0.0);
    let (mut m2_a, mut m2_b, mut co) = (0.0, 0.0, 0.0);
    for (k, (&x, &y)) in a.iter().zip(b).enumerate() {
        if !x.is_finite() {
            return Err(Error::NonFinite { index: k, value: x });
        }
        if !y.is_finite() {
            return Err(Error::NonFinite { index: k, value: y });
        }
        let n = (k + 1) as f64;
        let dx = x - mean_a;
        let dy = y - mean_b;
        mean_a += dx / n;
        mean_b += dy / n;
        m2_a += dx * (x - mean_a);
        m2_b += dy * (y - mean_b);
        co += dx * (y - mean_b);
    }
    if m2_a == 0.0 || m2_b == 0.0 {
        return Err(Error::ConstantSeries);
    }
    Ok((co / (m2_a.sqrt() * m2_b.sqrt())).clamp(-1.0, 1.0))
}
