use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use driftwatch_core::engine::{DEFAULT_BIN_COUNT, DEFAULT_QUANTILE, DEFAULT_SMOOTHING, DEFAULT_SPLITS};
use driftwatch_core::MetricKind;

#[derive(Debug, Parser)]
#[command(
    name = "driftwatch",
    version,
    about = "Measure distribution drift of embedding sets against a reference",
    after_help = "Exit codes: 0 success, 2 usage error, 3 data or format error, \
                  4 alert raised under `monitor --fail-on-alert`.\n\
                  DRIFTWATCH_THREADS caps worker threads (0 = one per core)."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a reference profile from an embedding file.
    BuildRef(BuildRefArgs),
    /// Drift of one test set against a reference profile.
    Drift(DriftArgs),
    /// Drift of a sequence of test sets, with optional alerting.
    Monitor(MonitorArgs),
    /// Equal error rate of fake/real score files.
    Eer(EerArgs),
    /// Generate synthetic embedding sets.
    Synth(SynthArgs),
    /// Render a monitor-series document as an SVG chart.
    Plot(PlotArgs),
    /// Pairwise correlation of the metrics in a monitor-series document.
    Correlate(CorrelateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FileFormat {
    Binary,
    Csv,
}

/// One `--metric` value: a single metric or `all`.
#[derive(Debug, Clone)]
pub struct MetricSelection(pub Vec<MetricKind>);

fn parse_metric(s: &str) -> Result<MetricSelection, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(MetricSelection(MetricKind::ALL.to_vec()));
    }
    s.parse::<MetricKind>()
        .map(|m| MetricSelection(vec![m]))
        .map_err(|_| format!("unknown metric `{s}` (expected wasserstein1, ks, kld or all)"))
}

/// Flattens repeated `--metric` flags, keeping first occurrences.
pub fn expand_metrics(selections: &[MetricSelection]) -> Vec<MetricKind> {
    let mut out = Vec::new();
    for m in selections.iter().flat_map(|s| s.0.iter().copied()) {
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        out.push(MetricKind::Wasserstein1);
    }
    out
}

fn parse_unit_open(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is outside (0, 1)"))
    }
}

fn parse_unit_closed(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

fn parse_nonneg(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} must be finite and nonnegative"))
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} must be finite and positive"))
    }
}

fn parse_finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} must be finite"))
    }
}

#[derive(Debug, Clone, Copy)]
pub enum ThresholdArg {
    Absolute(f64),
    Auto,
}

fn parse_threshold(s: &str) -> Result<ThresholdArg, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(ThresholdArg::Auto);
    }
    parse_finite(s).map(ThresholdArg::Absolute)
}

#[derive(Debug, Args)]
pub struct DriftTuning {
    /// KL smoothing mass added to every histogram bin before renormalizing.
    #[arg(long, default_value_t = DEFAULT_SMOOTHING, value_parser = parse_nonneg)]
    pub smoothing: f64,
}

#[derive(Debug, Args)]
pub struct CalibrationArgs {
    /// Number of random half-vs-half splits for threshold calibration.
    #[arg(long, default_value_t = DEFAULT_SPLITS as u32, value_parser = clap::value_parser!(u32).range(10..))]
    pub splits: u32,
    /// Quantile of the self-drift values used as the threshold.
    #[arg(long, default_value_t = DEFAULT_QUANTILE, value_parser = parse_unit_open)]
    pub quantile: f64,
    /// Seed for the calibration splits.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Also write the report document to this file.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Timestamp string recorded in the report (omitted by default).
    #[arg(long)]
    pub timestamp: Option<String>,
}

#[derive(Debug, Args)]
pub struct BuildRefArgs {
    /// Reference embeddings (`.csv`, anything else is read as binary).
    #[arg(long, short)]
    pub input: PathBuf,
    /// Where to write the profile.
    #[arg(long, short)]
    pub output: PathBuf,
    /// Histogram bins per dimension.
    #[arg(long, default_value_t = DEFAULT_BIN_COUNT as u32, value_parser = clap::value_parser!(u32).range(2..))]
    pub bins: u32,
    /// Profile identifier (defaults to the input file stem).
    #[arg(long)]
    pub id: Option<String>,
    /// Calibrate a self-drift threshold for this metric and store it in the
    /// profile; repeatable, `all` selects every metric.
    #[arg(long = "calibrate", value_name = "METRIC", value_parser = parse_metric)]
    pub calibrate: Vec<MetricSelection>,
    #[command(flatten)]
    pub calibration: CalibrationArgs,
    #[command(flatten)]
    pub tuning: DriftTuning,
}

#[derive(Debug, Args)]
pub struct DriftArgs {
    /// Reference profile written by `build-ref`.
    #[arg(long = "ref", short = 'r', value_name = "PROFILE")]
    pub reference: PathBuf,
    /// Test embeddings.
    #[arg(long, short)]
    pub test: PathBuf,
    /// Metric: wasserstein1, ks, kld or all; repeatable. Several metrics
    /// produce a monitor-series document with one entry.
    #[arg(long, short, value_parser = parse_metric)]
    pub metric: Vec<MetricSelection>,
    #[command(flatten)]
    pub tuning: DriftTuning,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MonitorArgs {
    /// Reference profile written by `build-ref`.
    #[arg(long = "ref", short = 'r', value_name = "PROFILE")]
    pub reference: PathBuf,
    /// Test embeddings in submission order; repeatable.
    #[arg(long, short, required = true)]
    pub test: Vec<PathBuf>,
    /// Metric: wasserstein1, ks, kld or all; repeatable.
    #[arg(long, short, value_parser = parse_metric)]
    pub metric: Vec<MetricSelection>,
    /// Alert threshold on the total drift: a number, or `auto` to calibrate
    /// from the reference.
    #[arg(long, value_parser = parse_threshold)]
    pub threshold: Option<ThresholdArg>,
    /// Metric the threshold applies to (defaults to the first metric).
    #[arg(long, value_parser = parse_metric)]
    pub threshold_metric: Option<MetricSelection>,
    /// Exit with status 4 when any entry raises an alert.
    #[arg(long)]
    pub fail_on_alert: bool,
    #[command(flatten)]
    pub calibration: CalibrationArgs,
    #[command(flatten)]
    pub tuning: DriftTuning,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EerArgs {
    /// Fake-class score file, one score per line; repeatable, paired with
    /// `--real` in order and pooled.
    #[arg(long, required = true)]
    pub fake: Vec<PathBuf>,
    /// Real-class score file; repeatable.
    #[arg(long, required = true)]
    pub real: Vec<PathBuf>,
    /// Treat lower scores as more likely real.
    #[arg(long)]
    pub invert_polarity: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Gaussian,
    Mixture,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Dimensions per embedding.
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u32).range(1..))]
    pub dim: u32,
    /// Rows per set.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    /// Comma-separated location shifts, one set per shift.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_finite, conflicts_with = "finetune")]
    pub shifts: Vec<f64>,
    /// Standard deviation of every component.
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    pub scale: f64,
    /// Distribution family.
    #[arg(long, value_enum, default_value_t = FamilyArg::Gaussian)]
    pub family: FamilyArg,
    /// Comma-separated mixture weights (mixture family only).
    #[arg(long, value_delimiter = ',', value_parser = parse_nonneg)]
    pub weights: Vec<f64>,
    /// Base random seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Instead of generating, resample this test set toward `--toward`.
    #[arg(long, value_name = "TEST", requires_all = ["toward", "lambda"])]
    pub finetune: Option<PathBuf>,
    /// Reference set the fine-tuning resample pulls toward.
    #[arg(long, value_name = "REFERENCE", requires = "finetune")]
    pub toward: Option<PathBuf>,
    /// Probability of drawing each row from the reference.
    #[arg(long, value_parser = parse_unit_closed, requires = "finetune")]
    pub lambda: Option<f64>,
    /// Output file (single set only).
    #[arg(long, short, conflicts_with = "out_dir")]
    pub output: Option<PathBuf>,
    /// Output directory; set k is written as `<prefix><k>.<ext>`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// File name prefix inside `--out-dir`.
    #[arg(long, default_value = "set")]
    pub prefix: String,
    /// Output format (defaults to the `--output` extension, else binary).
    #[arg(long, value_enum)]
    pub format: Option<FileFormat>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Monitor-series document written by `monitor` or `drift`.
    #[arg(long, short)]
    pub series: PathBuf,
    /// Where to write the SVG.
    #[arg(long, short)]
    pub output: PathBuf,
    /// Chart title.
    #[arg(long)]
    pub title: Option<String>,
    /// Horizontal line at this normalized level in [0, 1]. Defaults to the
    /// series threshold mapped onto its metric's normalized curve.
    #[arg(long, value_parser = parse_unit_closed)]
    pub threshold_line: Option<f64>,
    /// Chart width in pixels.
    #[arg(long, default_value_t = 800, value_parser = clap::value_parser!(u32).range(300..))]
    pub width: u32,
    /// Chart height in pixels.
    #[arg(long, default_value_t = 420, value_parser = clap::value_parser!(u32).range(200..))]
    pub height: u32,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    /// Monitor-series document with at least two metrics and two entries.
    #[arg(long, short)]
    pub series: PathBuf,
}
