use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use driftwatch_core::io::{
    emit_drift_plot, load_profile, load_report, read_embeddings, read_scores, save_profile, save_report,
    write_embeddings, EmbeddingFormat, PlotOptions, ReportBody, ReportDocument,
};
use driftwatch_core::{
    build_reference, calibrate_threshold, drift_distance, generate, evolve_sequence, metric_agreement, monitor,
    pooled_eer, simulate_finetune, Calibration, DriftOptions, EmbeddingSet, Family, MonitorSeries,
    ProfileOptions, ReferenceProfile, ScoreSet, SynthSpec, ThresholdPolicy,
};
use serde_json::json;

use crate::args::{
    expand_metrics, BuildRefArgs, CalibrationArgs, Command, CorrelateArgs, DriftArgs, EerArgs, FamilyArg, FileFormat,
    MonitorArgs, PlotArgs, SynthArgs, ThresholdArg,
};
use crate::output::{input_file, output_dir, output_file, Staged};
use crate::{CliError, EXIT_ALERT, EXIT_OK};

type CmdResult = Result<i32, CliError>;

fn data(context: impl Display, e: impl Display) -> CliError {
    CliError::Data(format!("{context}: {e}"))
}

pub(crate) fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match command {
        Command::BuildRef(a) => build_ref(a, out),
        Command::Drift(a) => drift(a, out),
        Command::Monitor(a) => run_monitor(a, out, err),
        Command::Eer(a) => eer(a, out),
        Command::Synth(a) => synth(a, out),
        Command::Plot(a) => plot(a),
        Command::Correlate(a) => correlate(a, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::Data(format!("cannot write to standard output: {e}")))
}

fn read_bytes(flag: &str, path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| data(format_args!("{flag} {}", path.display()), e))
}

fn read_text(flag: &str, path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| data(format_args!("{flag} {}", path.display()), e))
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn read_set(flag: &str, path: &Path, label: Option<String>) -> Result<EmbeddingSet, CliError> {
    let bytes = read_bytes(flag, path)?;
    let label = label.unwrap_or_else(|| file_stem(path));
    read_embeddings(&bytes, EmbeddingFormat::from_path(path), label)
        .map_err(|e| data(format_args!("{flag} {}", path.display()), e))
}

fn read_profile(flag: &str, path: &Path) -> Result<ReferenceProfile, CliError> {
    load_profile(&read_bytes(flag, path)?).map_err(|e| data(format_args!("{flag} {}", path.display()), e))
}

fn read_series(flag: &str, path: &Path) -> Result<MonitorSeries, CliError> {
    let doc = load_report(&read_text(flag, path)?).map_err(|e| data(format_args!("{flag} {}", path.display()), e))?;
    match doc.body {
        ReportBody::Series(series) => Ok(series),
        ReportBody::Drift(_) => Err(CliError::Data(format!(
            "{flag} {}: expected a monitor-series document, found a drift-report",
            path.display()
        ))),
    }
}

fn calibration(args: &CalibrationArgs) -> Calibration {
    Calibration {
        splits: args.splits as usize,
        quantile: args.quantile,
        seed: args.seed,
    }
}

fn build_ref(args: BuildRefArgs, out: &mut dyn Write) -> CmdResult {
    input_file("--input", &args.input)?;
    output_file("--output", &args.output)?;

    let set = read_set("--input", &args.input, args.id.clone())?;
    let mut profile = build_reference(
        &set,
        &ProfileOptions {
            bin_count: args.bins as usize,
        },
    )
    .map_err(|e| data(format_args!("--input {}", args.input.display()), e))?;

    let options = DriftOptions {
        smoothing: args.tuning.smoothing,
    };
    let cal = calibration(&args.calibration);
    let mut thresholds = serde_json::Map::new();
    if !args.calibrate.is_empty() {
        for metric in expand_metrics(&args.calibrate) {
            let t = calibrate_threshold(&mut profile, metric, &cal, &options)
                .map_err(|e| data(format_args!("--calibrate {metric}"), e))?;
            thresholds.insert(metric.name().to_owned(), json!(t));
        }
    }

    let summary = json!({
        "id": profile.id(),
        "dim": profile.dim(),
        "rows": profile.row_count(),
        "bins": profile.bin_count(),
        "thresholds": thresholds,
    });
    let mut staged = Staged::default();
    staged.file(args.output, save_profile(&profile));
    staged.commit()?;
    emit(out, &(serde_json::to_string_pretty(&summary).expect("summary is plain json") + "\n"))?;
    Ok(EXIT_OK)
}

fn drift(args: DriftArgs, out: &mut dyn Write) -> CmdResult {
    input_file("--ref", &args.reference)?;
    input_file("--test", &args.test)?;
    if let Some(p) = &args.output.output {
        output_file("--output", p)?;
    }

    let profile = read_profile("--ref", &args.reference)?;
    let test = read_set("--test", &args.test, None)?;
    let metrics = expand_metrics(&args.metric);
    let options = DriftOptions {
        smoothing: args.tuning.smoothing,
    };
    let context = format_args!("--test {}", args.test.display()).to_string();
    let doc = if let [metric] = metrics[..] {
        ReportDocument::drift(drift_distance(&profile, &test, metric, &options).map_err(|e| data(&context, e))?)
    } else {
        ReportDocument::series(
            monitor(&profile, std::slice::from_ref(&test), &metrics, None, &options).map_err(|e| data(&context, e))?,
        )
    };
    let text = save_report(&doc.with_timestamp(args.output.timestamp));

    let mut staged = Staged::default();
    if let Some(p) = args.output.output {
        staged.file(p, text.clone().into_bytes());
    }
    staged.commit()?;
    emit(out, &text)?;
    Ok(EXIT_OK)
}

fn run_monitor(args: MonitorArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    input_file("--ref", &args.reference)?;
    for t in &args.test {
        input_file("--test", t)?;
    }
    if let Some(p) = &args.output.output {
        output_file("--output", p)?;
    }
    let metrics = expand_metrics(&args.metric);
    let policy = match args.threshold {
        None => {
            if args.threshold_metric.is_some() {
                return Err(CliError::Usage("--threshold-metric requires --threshold".into()));
            }
            None
        }
        Some(threshold) => {
            let metric = match &args.threshold_metric {
                None => metrics[0],
                Some(sel) if sel.0.len() == 1 => sel.0[0],
                Some(_) => return Err(CliError::Usage("--threshold-metric takes a single metric".into())),
            };
            if !metrics.contains(&metric) {
                return Err(CliError::Usage(format!(
                    "--threshold-metric {metric} is not among the monitored metrics"
                )));
            }
            Some(match threshold {
                ThresholdArg::Absolute(v) => ThresholdPolicy::absolute(metric, v),
                ThresholdArg::Auto => ThresholdPolicy::calibrated(metric, calibration(&args.calibration)),
            })
        }
    };

    let profile = read_profile("--ref", &args.reference)?;
    let tests = args
        .test
        .iter()
        .map(|t| read_set("--test", t, None))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some((path, t)) = args.test.iter().zip(&tests).find(|(_, t)| t.dim() != profile.dim()) {
        return Err(CliError::Data(format!(
            "--test {}: dimension {} does not match the reference dimension {}",
            path.display(),
            t.dim(),
            profile.dim()
        )));
    }
    let options = DriftOptions {
        smoothing: args.tuning.smoothing,
    };
    let series = monitor(&profile, &tests, &metrics, policy.as_ref(), &options).map_err(|e| data("monitor", e))?;
    let alerted: Vec<&str> = series
        .entries()
        .iter()
        .filter(|e| e.alert)
        .map(|e| e.test_label.as_str())
        .collect();
    let text = save_report(&ReportDocument::series(series.clone()).with_timestamp(args.output.timestamp));

    if !alerted.is_empty() {
        let _ = writeln!(
            err,
            "alert: {} of {} test sets exceed the threshold {}: {}",
            alerted.len(),
            series.len(),
            series.threshold().unwrap_or(f64::NAN),
            alerted.join(", ")
        );
    }
    if args.fail_on_alert && !alerted.is_empty() {
        emit(out, &text)?;
        return Ok(EXIT_ALERT);
    }
    let mut staged = Staged::default();
    if let Some(p) = args.output.output {
        staged.file(p, text.clone().into_bytes());
    }
    staged.commit()?;
    emit(out, &text)?;
    Ok(EXIT_OK)
}

fn eer(args: EerArgs, out: &mut dyn Write) -> CmdResult {
    if args.fake.len() != args.real.len() {
        return Err(CliError::Usage(format!(
            "--fake given {} times but --real {} times; they must pair up",
            args.fake.len(),
            args.real.len()
        )));
    }
    for p in &args.fake {
        input_file("--fake", p)?;
    }
    for p in &args.real {
        input_file("--real", p)?;
    }
    let scores = |flag: &str, path: &PathBuf| -> Result<Vec<f64>, CliError> {
        read_scores(&read_text(flag, path)?).map_err(|e| data(format_args!("{flag} {}", path.display()), e))
    };
    let mut groups = Vec::with_capacity(args.fake.len());
    for (f, r) in args.fake.iter().zip(&args.real) {
        let set = ScoreSet::new(scores("--fake", f)?, scores("--real", r)?)
            .map_err(|e| data(format_args!("--fake {} / --real {}", f.display(), r.display()), e))?;
        groups.push(if args.invert_polarity { set.inverted() } else { set });
    }
    let value = pooled_eer(&groups).map_err(|e| data("eer", e))?;
    emit(out, &format!("{value:.4}\n"))?;
    Ok(EXIT_OK)
}

fn embedding_format(explicit: Option<FileFormat>, path: Option<&Path>) -> EmbeddingFormat {
    match explicit {
        Some(FileFormat::Binary) => EmbeddingFormat::Binary,
        Some(FileFormat::Csv) => EmbeddingFormat::Csv,
        None => path.map_or(EmbeddingFormat::Binary, EmbeddingFormat::from_path),
    }
}

fn encode(flag: &str, path: &Path, set: &EmbeddingSet, format: EmbeddingFormat) -> Result<Vec<u8>, CliError> {
    write_embeddings(set, format).map_err(|e| data(format_args!("{flag} {}", path.display()), e))
}

fn synth(args: SynthArgs, out: &mut dyn Write) -> CmdResult {
    let mut staged = Staged::default();
    let mut written = Vec::new();

    if let Some(test_path) = &args.finetune {
        let toward = args.toward.as_ref().expect("clap enforces --toward");
        let lambda = args.lambda.expect("clap enforces --lambda");
        input_file("--finetune", test_path)?;
        input_file("--toward", toward)?;
        let Some(output) = &args.output else {
            return Err(CliError::Usage("--finetune writes one set; give --output".into()));
        };
        output_file("--output", output)?;
        let test = read_set("--finetune", test_path, None)?;
        let reference = read_set("--toward", toward, None)?;
        let set = simulate_finetune(&test, &reference, lambda, args.seed).map_err(|e| data("--finetune", e))?;
        let format = embedding_format(args.format, Some(output));
        staged.file(output.clone(), encode("--output", output, &set, format)?);
        written.push((output.clone(), set.label().to_owned()));
    } else {
        if args.shifts.is_empty() {
            return Err(CliError::Usage("give --shifts, or --finetune with --toward and --lambda".into()));
        }
        let family = match (args.family, args.weights.is_empty()) {
            (FamilyArg::Gaussian, true) => Family::Gaussian,
            (FamilyArg::Gaussian, false) => {
                return Err(CliError::Usage("--weights only applies to --family mixture".into()))
            }
            (FamilyArg::Mixture, true) => return Err(CliError::Usage("--family mixture needs --weights".into())),
            (FamilyArg::Mixture, false) => Family::GaussianMixture {
                weights: args.weights.clone(),
            },
        };
        let base = SynthSpec {
            dim: args.dim as usize,
            count: args.count as usize,
            family,
            shift: args.shifts[0],
            scale: args.scale,
            seed: args.seed,
        };
        base.validate().map_err(|e| CliError::Usage(e.to_string()))?;

        match (&args.output, &args.out_dir) {
            (Some(output), None) => {
                if args.shifts.len() != 1 {
                    return Err(CliError::Usage(
                        "--output takes a single shift; use --out-dir for a sequence".into(),
                    ));
                }
                output_file("--output", output)?;
                let set = generate(&base).map_err(|e| data("synth", e))?;
                let format = embedding_format(args.format, Some(output));
                staged.file(output.clone(), encode("--output", output, &set, format)?);
                written.push((output.clone(), set.label().to_owned()));
            }
            (None, Some(dir)) => {
                output_dir("--out-dir", dir)?;
                let sets = evolve_sequence(&base, &args.shifts).map_err(|e| data("synth", e))?;
                let format = embedding_format(args.format, None);
                let ext = match format {
                    EmbeddingFormat::Binary => "drft",
                    EmbeddingFormat::Csv => "csv",
                };
                let width = (sets.len() - 1).to_string().len().max(2);
                staged.dir(dir.clone());
                for (k, set) in sets.iter().enumerate() {
                    let path = dir.join(format!("{}{k:0width$}.{ext}", args.prefix));
                    staged.file(path.clone(), encode("--out-dir", &path, set, format)?);
                    written.push((path, set.label().to_owned()));
                }
            }
            _ => return Err(CliError::Usage("give exactly one of --output or --out-dir".into())),
        }
    }

    staged.commit()?;
    let listing: String = written
        .iter()
        .map(|(p, label)| format!("{}\t{label}\n", p.display()))
        .collect();
    emit(out, &listing)?;
    Ok(EXIT_OK)
}

/// The series threshold expressed on its metric's min-max-normalized curve,
/// when it falls inside the plotted range.
fn normalized_threshold(series: &MonitorSeries) -> Option<f64> {
    let (policy, threshold) = (series.policy()?, series.threshold()?);
    let totals = series.totals(policy.metric)?;
    let min = totals.iter().copied().fold(f64::INFINITY, f64::min);
    let max = totals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > min) {
        return None;
    }
    let t = (threshold - min) / (max - min);
    (0.0..=1.0).contains(&t).then_some(t)
}

fn plot(args: PlotArgs) -> CmdResult {
    input_file("--series", &args.series)?;
    output_file("--output", &args.output)?;
    let series = read_series("--series", &args.series)?;
    let options = PlotOptions {
        width: args.width,
        height: args.height,
        title: args.title,
        threshold: args.threshold_line.or_else(|| normalized_threshold(&series)),
    };
    let svg = emit_drift_plot(&series, &options).map_err(|e| data(format_args!("--series {}", args.series.display()), e))?;
    let mut staged = Staged::default();
    staged.file(args.output, svg.into_bytes());
    staged.commit()?;
    Ok(EXIT_OK)
}

fn correlate(args: CorrelateArgs, out: &mut dyn Write) -> CmdResult {
    input_file("--series", &args.series)?;
    let series = read_series("--series", &args.series)?;
    let matrix = metric_agreement(&series).map_err(|e| data(format_args!("--series {}", args.series.display()), e))?;
    let names: Vec<&str> = matrix.metrics.iter().map(|m| m.name()).collect();
    let doc = json!({
        "metrics": names,
        "correlation": matrix.values,
        "min_off_diagonal": matrix.min_off_diagonal(),
    });
    emit(out, &(serde_json::to_string_pretty(&doc).expect("matrix is finite") + "\n"))?;
    Ok(EXIT_OK)
}

