//! Univariate distribution estimates and the distances between them.
//!
//! The CDF-based distances ([`wasserstein1`], [`ks_statistic`]) work on exact
//! empirical CDFs with arbitrary supports; [`kl_divergence`] needs two PMFs
//! on one shared support, which in practice means two histograms built from
//! the same [`HistogramSpec`].

mod ecdf;
mod histogram;
mod metrics;
mod series;

pub use ecdf::{build_empirical_cdf, merge_supports, EmpiricalCdf};
pub use histogram::{build_histogram, DiscretePmf, EdgePolicy, HistogramSpec};
pub use metrics::{kl_divergence, ks_statistic, wasserstein1, MetricKind};
pub use series::{min_max_normalize, pearson_correlation};

pub(crate) use histogram::{bin_counts, pmf_from_counts};
