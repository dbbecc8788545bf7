use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ecdf::{merged_steps, EmpiricalCdf};
use super::histogram::DiscretePmf;
use crate::error::{Error, Result};

/// The univariate distances a drift score can be built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MetricKind {
    #[serde(rename = "wasserstein1")]
    Wasserstein1,
    #[serde(rename = "kolmogorov-smirnov")]
    KolmogorovSmirnov,
    #[serde(rename = "kullback-leibler")]
    KullbackLeibler,
}

impl MetricKind {
    /// Every metric, in canonical order.
    pub const ALL: [MetricKind; 3] = [
        MetricKind::Wasserstein1,
        MetricKind::KolmogorovSmirnov,
        MetricKind::KullbackLeibler,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Wasserstein1 => "wasserstein1",
            MetricKind::KolmogorovSmirnov => "kolmogorov-smirnov",
            MetricKind::KullbackLeibler => "kullback-leibler",
        }
    }

    /// Short label used in plots.
    pub fn short_name(self) -> &'static str {
        match self {
            MetricKind::Wasserstein1 => "W1",
            MetricKind::KolmogorovSmirnov => "K-S",
            MetricKind::KullbackLeibler => "KLD",
        }
    }

    pub(crate) fn tag(self) -> u8 {
        match self {
            MetricKind::Wasserstein1 => 0,
            MetricKind::KolmogorovSmirnov => 1,
            MetricKind::KullbackLeibler => 2,
        }
    }

    pub(crate) fn from_tag(tag: u8) -> Option<Self> {
        Self::ALL.get(tag as usize).copied()
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wasserstein1" | "wasserstein" | "w1" => Ok(MetricKind::Wasserstein1),
            "kolmogorov-smirnov" | "ks" | "k-s" => Ok(MetricKind::KolmogorovSmirnov),
            "kullback-leibler" | "kl" | "kld" => Ok(MetricKind::KullbackLeibler),
            other => Err(Error::InvalidParameter(format!("unknown metric '{other}'"))),
        }
    }
}

/// Area between the two CDFs.
///
/// On the merged support `s_1 < ... < s_N` this is
/// `sum_{n=2..N} |F_p(s_{n-1}) - F_q(s_{n-1})| * (s_n - s_{n-1})`: each gap
/// is weighted by the CDF difference holding over the interval to its left.
pub fn wasserstein1(p: &EmpiricalCdf, q: &EmpiricalCdf) -> f64 {
    let mut steps = merged_steps(p, q);
    let Some((mut prev_s, mut prev_fp, mut prev_fq)) = steps.next() else {
        return 0.0;
    };
    let mut total = 0.0;
    for (s, fp, fq) in steps {
        total += (prev_fp - prev_fq).abs() * (s - prev_s);
        prev_s = s;
        prev_fp = fp;
        prev_fq = fq;
    }
    total
}

/// Largest absolute CDF gap over the merged support.
pub fn ks_statistic(p: &EmpiricalCdf, q: &EmpiricalCdf) -> f64 {
    merged_steps(p, q).fold(0.0, |acc, (_, fp, fq)| f64::max(acc, (fp - fq).abs()))
}

/// `D(p || q)` in nats on a shared support.
///
/// With `smoothing > 0` every bin of both PMFs receives `smoothing` extra
/// mass before renormalizing. With `smoothing == 0`, bins where `p` is zero
/// contribute nothing and a bin where only `q` is zero is an error.
pub fn kl_divergence(p: &DiscretePmf, q: &DiscretePmf, smoothing: f64) -> Result<f64> {
    if !(smoothing >= 0.0) || !smoothing.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "smoothing must be a nonnegative finite number, got {smoothing}"
        )));
    }
    if p.support() != q.support() {
        return Err(Error::SupportMismatch);
    }
    let norm = 1.0 + smoothing * p.len() as f64;
    let mut total = 0.0;
    for (bin, (&fp, &fq)) in p.mass().iter().zip(q.mass()).enumerate() {
        let (fp, fq) = if smoothing > 0.0 {
            ((fp + smoothing) / norm, (fq + smoothing) / norm)
        } else {
            (fp, fq)
        };
        if fp == 0.0 {
            continue;
        }
        if fq == 0.0 {
            return Err(Error::ZeroReferenceMass { bin });
        }
        total += fp * (fp / fq).ln();
    }
    // Gibbs: rounding can leave a tiny negative residue for near-equal PMFs.
    Ok(total.max(0.0))
}
