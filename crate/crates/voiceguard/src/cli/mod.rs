//! Command-line surface: `extract | stats | train | sweep | bench | stream |
//! report`, with exit codes 0 (success), 1 (usage), 2 (data), 3 (internal).

use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::thread;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::audio_io::{self, AudioClip, AudioError};
use crate::dataset::{self, DataError, Label, LabeledDataset};
use crate::dsp::{self, DspError};
use crate::eval::{self, EvalError};
use crate::models::{ModelError, ModelFamily, ModelSpec, TrainedModel};
use crate::stats::{self, StatsError};
use crate::{Features, CANONICAL_SAMPLE_RATE, WINDOW_SECONDS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

// ---------------------------------------------------------------- errors

/// Command failure bucketed by exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<AudioError> for CliError {
    fn from(e: AudioError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<DspError> for CliError {
    fn from(e: DspError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::InvalidHyperparameter { .. } | ModelError::UnknownFamily(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::NotSweepable(_) => CliError::Usage(e.to_string()),
            EvalError::Model(m) => m.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}

fn write_out(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::Internal(format!("writing {}: {e}", path.display())))
}

// ------------------------------------------------------------- arguments

#[derive(Parser, Debug)]
#[command(
    name = "voiceguard",
    version,
    about = "Detect AI-converted speech from 1-second audio windows"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Extract the 26-feature row per 1-second window from WAV files into a dataset CSV
    Extract(ExtractArgs),
    /// Write class-summary, t-test, ranking, and single-rule report files
    Stats(StatsArgs),
    /// Cross-validate a classifier, refit it on all data, and save the model file
    Train(TrainArgs),
    /// Sweep a family's primary hyperparameter; one CSV row per grid point
    Sweep(SweepArgs),
    /// Benchmark single-row inference latency of a saved model
    Bench(BenchArgs),
    /// Emit one verdict line per completed 1-second window of audio
    Stream(StreamArgs),
    /// Print the statistical analysis as aligned text tables
    Report(ReportArgs),
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    /// WAV files or directories (directories are searched recursively for .wav)
    #[arg(required_unless_present = "manifest", conflicts_with = "manifest")]
    pub inputs: Vec<PathBuf>,
    /// Label applied to every positional input: REAL or FAKE
    #[arg(long)]
    pub label: Option<Label>,
    /// Manifest of `path,label` lines (one WAV per line) instead of positional inputs
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Output dataset CSV
    #[arg(long, short, default_value = "dataset.csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    /// Dataset CSV (26 feature columns + LABEL)
    pub dataset: PathBuf,
    /// Directory the report files are written into
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = eval::DEFAULT_FOLDS)]
    pub folds: usize,
    #[arg(long, default_value_t = eval::DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Dataset CSV (26 feature columns + LABEL)
    pub dataset: PathBuf,
    /// Model family: gbt | random_forest | lda | qda | ridge | gaussian_nb | bernoulli_nb | knn | sgd_linear
    #[arg(long)]
    pub family: ModelFamily,
    /// Hyperparameter override, repeatable: --hp rounds=330
    #[arg(long = "hp", value_name = "NAME=VALUE")]
    pub hyperparameters: Vec<String>,
    /// Where the fitted model is saved
    #[arg(long, default_value = "model.json")]
    pub model_out: PathBuf,
    /// Also write the per-fold metrics CSV here
    #[arg(long)]
    pub cv_out: Option<PathBuf>,
    #[arg(long, default_value_t = eval::DEFAULT_FOLDS)]
    pub folds: usize,
    #[arg(long, default_value_t = eval::DEFAULT_SEED)]
    pub seed: u64,
    /// Skip the default 1:1 undersampling of the majority class
    #[arg(long)]
    pub no_balance: bool,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Dataset CSV (26 feature columns + LABEL)
    pub dataset: PathBuf,
    /// Swept family: gbt | random_forest | knn
    #[arg(long)]
    pub family: ModelFamily,
    /// Grid: `start:stop:step` (stop inclusive) or a comma list like `1,2,5`
    #[arg(long)]
    pub grid: String,
    /// Output CSV, one row per grid point
    #[arg(long, short, default_value = "sweep.csv")]
    pub out: PathBuf,
    #[arg(long, default_value_t = eval::DEFAULT_FOLDS)]
    pub folds: usize,
    #[arg(long, default_value_t = eval::DEFAULT_SEED)]
    pub seed: u64,
    /// Skip the default 1:1 undersampling of the majority class
    #[arg(long)]
    pub no_balance: bool,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Dataset CSV the benchmark rows are sampled from
    pub dataset: PathBuf,
    /// Saved model file
    #[arg(long)]
    pub model: PathBuf,
    /// Number of timed single-row predictions
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Untimed warmup predictions before measuring
    #[arg(long, default_value_t = 100)]
    pub warmup: usize,
    #[arg(long, default_value_t = eval::DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct StreamArgs {
    /// Saved model file
    #[arg(long)]
    pub model: PathBuf,
    /// Input WAV path; omit (or pass `-`) to read raw PCM from standard input
    pub input: Option<PathBuf>,
    /// Sample rate of raw PCM input (required without a WAV path)
    #[arg(long)]
    pub rate: Option<u32>,
    /// Bit depth of raw PCM input: 16 (signed integer) or 32 (IEEE float)
    #[arg(long)]
    pub bits: Option<u16>,
    /// Print a human-readable table instead of JSON lines
    #[arg(long)]
    pub table: bool,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Dataset CSV (26 feature columns + LABEL)
    pub dataset: PathBuf,
    #[arg(long, default_value_t = eval::DEFAULT_FOLDS)]
    pub folds: usize,
    #[arg(long, default_value_t = eval::DEFAULT_SEED)]
    pub seed: u64,
}

// ------------------------------------------------------------- dispatch

/// Parse arguments and run; returns the process exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    run(cli)
}

pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Extract(args) => cmd_extract(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Train(args) => cmd_train(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Stream(args) => cmd_stream(args),
        Command::Report(args) => cmd_report(args),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

// -------------------------------------------------------------- extract

fn cmd_extract(args: ExtractArgs) -> Result<(), CliError> {
    let jobs: Vec<(PathBuf, Label)> = if let Some(manifest) = &args.manifest {
        read_manifest(manifest)?
    } else {
        let label = args.label.ok_or_else(|| {
            CliError::Usage(
                "--label REAL|FAKE is required with positional inputs (or use --manifest)"
                    .to_string(),
            )
        })?;
        let mut files = Vec::new();
        for input in &args.inputs {
            collect_wavs(input, &mut files)?;
        }
        files.sort();
        files.into_iter().map(|p| (p, label)).collect()
    };
    if jobs.is_empty() {
        return Err(CliError::Usage("no input WAV files found".to_string()));
    }

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut failures = 0usize;
    for (path, label) in &jobs {
        match extract_windows(path) {
            Ok(windows) => {
                if windows.is_empty() {
                    eprintln!(
                        "warning: {} is shorter than one {WINDOW_SECONDS}-second window; no rows extracted",
                        path.display()
                    );
                }
                for features in windows {
                    rows.push(features);
                    labels.push(*label);
                }
            }
            Err(e) => {
                failures += 1;
                eprintln!("warning: skipping {}: {e}", path.display());
            }
        }
    }
    if failures == jobs.len() {
        return Err(CliError::Data(format!(
            "all {failures} input file(s) failed to decode"
        )));
    }

    let ds = LabeledDataset::new(rows, labels).map_err(|e| CliError::Internal(e.to_string()))?;
    let n_real = ds.class_count(Label::Real);
    let n_fake = ds.class_count(Label::Fake);
    dataset::write_csv(&args.out, &ds)
        .map_err(|e| CliError::Internal(format!("writing {}: {e}", args.out.display())))?;
    println!(
        "wrote {} rows ({n_real} REAL / {n_fake} FAKE) to {}",
        ds.len(),
        args.out.display()
    );
    Ok(())
}

/// Decode one WAV, resample to the canonical rate, and extract one feature
/// row per full 1-second window.
fn extract_windows(path: &Path) -> Result<Vec<Features>, CliError> {
    let clip: AudioClip<f64> = audio_io::load(path)?;
    let clip = audio_io::resample(&clip, CANONICAL_SAMPLE_RATE);
    if clip.samples.is_empty() {
        return Ok(Vec::new());
    }
    audio_io::segment(&clip, WINDOW_SECONDS)
        .iter()
        .map(|w| dsp::extract_features(w).map_err(CliError::from))
        .collect()
}

/// Recursively gather .wav files under `input` (files are taken as given).
fn collect_wavs(input: &Path, files: &mut Vec<PathBuf>) -> Result<(), CliError> {
    if input.is_dir() {
        let entries = fs::read_dir(input)
            .map_err(|e| CliError::Data(format!("reading directory {}: {e}", input.display())))?;
        for entry in entries {
            let entry =
                entry.map_err(|e| CliError::Data(format!("reading {}: {e}", input.display())))?;
            let path = entry.path();
            if path.is_dir() {
                collect_wavs(&path, files)?;
            } else if path
                .extension()
                .is_some_and(|ext| ext.eq_ignore_ascii_case("wav"))
            {
                files.push(path);
            }
        }
    } else {
        files.push(input.to_path_buf());
    }
    Ok(())
}

/// Parse `path,label` manifest lines; a first line whose second field is
/// literally `label` is treated as a header and skipped.
fn read_manifest(path: &Path) -> Result<Vec<(PathBuf, Label)>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("reading manifest {}: {e}", path.display())))?;
    let mut jobs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let (file, label_text) = line.rsplit_once(',').ok_or_else(|| {
            CliError::Data(format!("manifest line {}: expected `path,label`", i + 1))
        })?;
        let label_text = label_text.trim();
        if i == 0 && label_text.eq_ignore_ascii_case("label") {
            continue;
        }
        let label: Label = label_text.parse().map_err(|_| {
            CliError::Data(format!(
                "manifest line {}: bad label {label_text:?} (expected REAL or FAKE)",
                i + 1
            ))
        })?;
        jobs.push((PathBuf::from(file.trim()), label));
    }
    Ok(jobs)
}

// ------------------------------------------------------- stats / report

struct Analysis {
    summary: Vec<stats::FeatureClassSummary>,
    ttests: Vec<(String, stats::TTestResult)>,
    ranking: Vec<stats::FeatureRank>,
    rule: stats::SingleRule,
}

/// Run the full statistical analysis; the single rule uses the feature with
/// the largest |Pearson r|.
fn analyze(ds: &LabeledDataset, folds: usize, seed: u64) -> Result<Analysis, CliError> {
    let summary = stats::class_summary(ds)?;
    let ttests = stats::t_test_table(ds)?;
    let ranking = stats::ranking(ds, 10)?;
    let best = ranking
        .iter()
        .max_by(|a, b| {
            a.pearson_r
                .abs()
                .partial_cmp(&b.pearson_r.abs())
                .expect("correlations are finite")
        })
        .expect("26 features");
    let feature_index = LabeledDataset::feature_index(&best.name)
        .expect("ranking names are canonical");
    let rule = stats::single_rule(ds, feature_index, folds, seed)?;
    Ok(Analysis {
        summary,
        ttests,
        ranking,
        rule,
    })
}

fn cmd_stats(args: StatsArgs) -> Result<(), CliError> {
    let ds = dataset::read_csv(&args.dataset)?;
    let analysis = analyze(&ds, args.folds, args.seed)?;
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Internal(format!("creating {}: {e}", args.out_dir.display())))?;
    write_out(
        &args.out_dir.join("summary.csv"),
        &stats::summary_csv(&analysis.summary),
    )?;
    write_out(
        &args.out_dir.join("ttests.csv"),
        &stats::ttests_csv(&analysis.ttests),
    )?;
    write_out(
        &args.out_dir.join("ranking.csv"),
        &stats::ranking_csv(&analysis.ranking),
    )?;
    write_out(
        &args.out_dir.join("single_rule.txt"),
        &stats::single_rule_text(&analysis.rule),
    )?;
    println!(
        "wrote summary.csv, ttests.csv, ranking.csv, single_rule.txt to {}",
        args.out_dir.display()
    );
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<(), CliError> {
    let ds = dataset::read_csv(&args.dataset)?;
    let analysis = analyze(&ds, args.folds, args.seed)?;
    println!("{}", stats::summary_text(&analysis.summary));
    println!("{}", stats::ttests_text(&analysis.ttests));
    println!("{}", stats::ranking_text(&analysis.ranking));
    println!("{}", stats::single_rule_text(&analysis.rule));
    Ok(())
}

// ---------------------------------------------------------------- train

/// Parse repeatable `--hp name=value` overrides into the spec.
fn apply_hyperparameters(spec: &mut ModelSpec, overrides: &[String]) -> Result<(), CliError> {
    for hp in overrides {
        let (name, value_text) = hp.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("--hp {hp:?}: expected NAME=VALUE"))
        })?;
        let value: f64 = value_text.trim().parse().map_err(|_| {
            CliError::Usage(format!("--hp {hp:?}: {value_text:?} is not a number"))
        })?;
        spec.set(name.trim(), value)?;
    }
    Ok(())
}

fn render_cv_table(report: &eval::CVReport) -> String {
    let mut out = format!("model: {}\n", report.model);
    out.push_str(&format!(
        "{:>5} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}\n",
        "fold", "accuracy", "precision", "recall", "f1", "mcc", "roc_auc"
    ));
    let row = |tag: &str, m: &eval::MetricsRecord| {
        let v = m.values();
        format!(
            "{tag:>5} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>9.4}\n",
            v[0], v[1], v[2], v[3], v[4], v[5]
        )
    };
    for (i, fold) in report.folds.iter().enumerate() {
        out.push_str(&row(&(i + 1).to_string(), fold));
    }
    out.push_str(&row("mean", &report.mean));
    out.push_str(&row("std", &report.std));
    out
}

fn cmd_train(args: TrainArgs) -> Result<(), CliError> {
    let ds = dataset::read_csv(&args.dataset)?;
    let mut spec = ModelSpec::new(args.family);
    apply_hyperparameters(&mut spec, &args.hyperparameters)?;
    let data = if args.no_balance {
        ds
    } else {
        eval::balance(&ds, args.seed)
    };
    let report = eval::kfold_cv(&data, &spec, args.folds, args.seed)?;
    print!("{}", render_cv_table(&report));
    if let Some(cv_out) = &args.cv_out {
        write_out(cv_out, &eval::cv_to_csv(&report))?;
    }
    let model = TrainedModel::fit(&spec, &data, args.seed)?;
    model
        .save(&args.model_out)
        .map_err(|e| CliError::Internal(format!("saving {}: {e}", args.model_out.display())))?;
    println!(
        "saved {} model trained on {} rows to {}",
        spec.describe(),
        data.len(),
        args.model_out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------- sweep

/// Parse `start:stop:step` (stop inclusive) or a comma list of integers.
fn parse_grid(text: &str) -> Result<Vec<usize>, CliError> {
    let bad = |msg: &str| CliError::Usage(format!("--grid {text:?}: {msg}"));
    let grid: Vec<usize> = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:stop:step"));
        }
        let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| bad("not an integer"));
        let (start, stop, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
        if step == 0 {
            return Err(bad("step must be positive"));
        }
        if start > stop {
            return Err(bad("start exceeds stop"));
        }
        (start..=stop).step_by(step).collect()
    } else {
        text.split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|_| bad("not an integer")))
            .collect::<Result<_, _>>()?
    };
    if grid.is_empty() {
        return Err(bad("grid is empty"));
    }
    Ok(grid)
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let grid = parse_grid(&args.grid)?;
    let name = args
        .family
        .primary_hyperparameter()
        .ok_or_else(|| CliError::Usage(EvalError::NotSweepable(args.family).to_string()))?;
    let ds = dataset::read_csv(&args.dataset)?;
    let data = if args.no_balance {
        ds
    } else {
        eval::balance(&ds, args.seed)
    };

    let results = eval::sweep(&data, args.family, &grid, args.folds, args.seed)?;
    let mut csv = format!("{name},accuracy,precision,recall,f1,mcc,roc_auc,mean_latency_ms\n");
    for (point, report) in &results {
        let spec = ModelSpec::new(args.family).with(name, *point as f64)?;
        let model = TrainedModel::fit(&spec, &data, args.seed)?;
        let latency = eval::bench_latency(&model, &data, 1000, 100, args.seed);
        let vals: Vec<String> = report.mean.values().iter().map(|v| v.to_string()).collect();
        csv.push_str(&format!(
            "{point},{},{}\n",
            vals.join(","),
            latency.mean_ms
        ));
        println!(
            "{name}={point}: accuracy {:.4} (std {:.4}), mean latency {:.4} ms",
            report.mean.accuracy, report.std.accuracy, latency.mean_ms
        );
    }
    write_out(&args.out, &csv)?;
    println!("wrote {} grid point(s) to {}", results.len(), args.out.display());
    Ok(())
}

// ---------------------------------------------------------------- bench

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    if args.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".to_string()));
    }
    let model = TrainedModel::load(&args.model)?;
    let ds = dataset::read_csv(&args.dataset)?;
    if ds.is_empty() {
        return Err(CliError::Data("dataset has no rows to sample".to_string()));
    }
    let latency = eval::bench_latency(&model, &ds, args.n, args.warmup, args.seed);
    println!("model: {}", model.spec.describe());
    println!(
        "timed {} single-row predictions after {} warmup calls",
        latency.n_samples, latency.warmup
    );
    println!(
        "mean {:.6} ms | min {:.6} ms | max {:.6} ms",
        latency.mean_ms, latency.min_ms, latency.max_ms
    );
    println!(
        "real-time factor vs {WINDOW_SECONDS}-second windows: {:.3e}",
        latency.mean_ms / (WINDOW_SECONDS * 1e3)
    );
    Ok(())
}

// --------------------------------------------------------------- stream

/// One classified window on the verdict stream.
#[derive(Debug, Clone, Serialize)]
pub struct VerdictEvent {
    pub window_index: usize,
    pub start_seconds: f64,
    pub label: Label,
    pub score: f64,
    /// Feature extraction plus model inference, milliseconds.
    pub inference_ms: f64,
}

struct VerdictSink<'a> {
    out: io::StdoutLock<'a>,
    table: bool,
    header_done: bool,
}

impl VerdictSink<'_> {
    fn emit(&mut self, event: &VerdictEvent) -> Result<(), CliError> {
        let io_err = |e: io::Error| CliError::Internal(format!("writing verdict: {e}"));
        if self.table {
            if !self.header_done {
                writeln!(
                    self.out,
                    "{:>7} {:>8} {:>6} {:>8} {:>12}",
                    "window", "start_s", "label", "score", "inference_ms"
                )
                .map_err(io_err)?;
                self.header_done = true;
            }
            writeln!(
                self.out,
                "{:>7} {:>8.1} {:>6} {:>8.4} {:>12.4}",
                event.window_index,
                event.start_seconds,
                event.label.to_string(),
                event.score,
                event.inference_ms
            )
            .map_err(io_err)?;
        } else {
            let line = serde_json::to_string(event)
                .map_err(|e| CliError::Internal(format!("encoding verdict: {e}")))?;
            writeln!(self.out, "{line}").map_err(io_err)?;
        }
        // verdicts must reach the consumer as soon as the window completes
        self.out.flush().map_err(io_err)?;
        Ok(())
    }

    /// Mid-stream failure: one diagnostic record, then the caller exits.
    fn emit_diagnostic(&mut self, message: &str) {
        if self.table {
            let _ = writeln!(self.out, "stream error: {message}");
        } else {
            let record = serde_json::json!({ "error": message });
            let _ = writeln!(self.out, "{record}");
        }
        let _ = self.out.flush();
    }
}

/// Classify one source-rate window: resample to the canonical rate, extract
/// features, predict.
fn classify_window(
    model: &TrainedModel,
    window: &AudioClip<f64>,
    index: usize,
) -> Result<VerdictEvent, CliError> {
    let started = Instant::now();
    let canonical = if window.sample_rate_hz == CANONICAL_SAMPLE_RATE {
        window.clone()
    } else {
        audio_io::resample(window, CANONICAL_SAMPLE_RATE)
    };
    let features = dsp::extract_features(&canonical)?;
    let prediction = model.predict(&features);
    let inference_ms = (started.elapsed().as_secs_f64() * 1e3).max(1e-6);
    Ok(VerdictEvent {
        window_index: index,
        start_seconds: index as f64 * WINDOW_SECONDS,
        label: prediction.label,
        score: prediction.score,
        inference_ms,
    })
}

/// One hand-off in the streaming pipeline: a decoded window ready for
/// classification, or a terminal fault from the decoding stage.
enum StreamItem {
    Window(AudioClip<f64>),
    /// Decoder fault that belongs on the verdict stream as a diagnostic
    /// record before the command exits with a data error.
    Diagnostic(String),
    /// Decoder failure that propagates as-is (nothing was mid-stream).
    Fail(CliError),
}

/// Decoding stage for WAV input: one window per hand-off.
fn decode_wav_windows(path: &Path, tx: &mpsc::SyncSender<StreamItem>) {
    let clip: AudioClip<f64> = match audio_io::load(path) {
        Ok(clip) => clip,
        Err(e) => {
            let _ = tx.send(StreamItem::Fail(e.into()));
            return;
        }
    };
    for window in audio_io::segment(&clip, WINDOW_SECONDS) {
        if tx.send(StreamItem::Window(window)).is_err() {
            return; // the classifier hung up
        }
    }
}

/// Decoding stage for raw PCM on standard input. Faults surface as
/// diagnostic records so the verdict consumer sees them in-stream.
fn decode_pcm_stdin(rate: u32, bits: u16, tx: &mpsc::SyncSender<StreamItem>) {
    let bytes_per_sample = usize::from(bits / 8);
    let window_len = rate as usize;

    let mut stdin = io::stdin().lock();
    let mut pending_bytes: Vec<u8> = Vec::new();
    let mut samples: Vec<f64> = Vec::new();
    let mut chunk = [0u8; 8192];
    loop {
        let read = match stdin.read(&mut chunk) {
            Ok(0) => break,
            Ok(n) => n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
            Err(e) => {
                let _ = tx.send(StreamItem::Diagnostic(format!("reading stdin: {e}")));
                return;
            }
        };
        pending_bytes.extend_from_slice(&chunk[..read]);
        let whole = pending_bytes.len() / bytes_per_sample * bytes_per_sample;
        for frame in pending_bytes[..whole].chunks_exact(bytes_per_sample) {
            let value = if bits == 16 {
                f64::from(i16::from_le_bytes([frame[0], frame[1]])) / 32768.0
            } else {
                f64::from(f32::from_le_bytes([frame[0], frame[1], frame[2], frame[3]]))
            };
            samples.push(value);
        }
        pending_bytes.drain(..whole);

        while samples.len() >= window_len {
            let rest = samples.split_off(window_len);
            let window = AudioClip::new(std::mem::replace(&mut samples, rest), rate);
            if tx.send(StreamItem::Window(window)).is_err() {
                return;
            }
        }
    }
    if !pending_bytes.is_empty() {
        let _ = tx.send(StreamItem::Diagnostic(format!(
            "input ended mid-sample: {} trailing byte(s) do not form a {bits}-bit sample",
            pending_bytes.len()
        )));
    }
    // a trailing partial window is silently discarded, matching extraction
}

fn cmd_stream(args: StreamArgs) -> Result<(), CliError> {
    let model = TrainedModel::load(&args.model)?;
    let stdout = io::stdout();
    let mut sink = VerdictSink {
        out: stdout.lock(),
        table: args.table,
        header_done: false,
    };

    let from_stdin = match &args.input {
        None => true,
        Some(p) => p.as_os_str() == "-",
    };

    // Decoding runs on its own thread and hands windows over a channel with
    // room for exactly one: decoding pauses whenever a window is still
    // waiting on classification, and FIFO hand-off keeps verdicts ordered.
    let (tx, rx) = mpsc::sync_channel::<StreamItem>(1);
    let decoder = if from_stdin {
        let rate = args.rate.ok_or_else(|| {
            CliError::Usage("--rate is required when streaming raw PCM from stdin".to_string())
        })?;
        if rate == 0 {
            return Err(CliError::Usage("--rate must be positive".to_string()));
        }
        let bits = args.bits.ok_or_else(|| {
            CliError::Usage("--bits is required when streaming raw PCM from stdin".to_string())
        })?;
        if bits != 16 && bits != 32 {
            return Err(CliError::Usage(
                "--bits must be 16 (signed PCM) or 32 (IEEE float)".to_string(),
            ));
        }
        thread::spawn(move || decode_pcm_stdin(rate, bits, &tx))
    } else {
        let path = args.input.clone().expect("checked above");
        thread::spawn(move || decode_wav_windows(&path, &tx))
    };

    let mut index = 0usize;
    let mut result = Ok(());
    for item in rx.iter() {
        match item {
            StreamItem::Window(window) => {
                match classify_window(&model, &window, index).and_then(|e| sink.emit(&e)) {
                    Ok(()) => index += 1,
                    Err(e) => {
                        result = Err(e);
                        break;
                    }
                }
            }
            StreamItem::Diagnostic(message) => {
                sink.emit_diagnostic(&message);
                result = Err(CliError::Data(message));
                break;
            }
            StreamItem::Fail(e) => {
                result = Err(e);
                break;
            }
        }
    }
    // Dropping the receiver on early exit unblocks a decoder waiting on the
    // hand-off; the join merely reaps the thread.
    drop(rx);
    let _ = decoder.join();
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("10:500:10").unwrap().len(), 50);
        assert_eq!(parse_grid("1:10:3").unwrap(), vec![1, 4, 7, 10]);
        assert_eq!(parse_grid("1,2,5").unwrap(), vec![1, 2, 5]);
        assert_eq!(parse_grid("7").unwrap(), vec![7]);
        for bad in ["", "5:1:1", "1:10:0", "1:10", "a,b", "1:b:2"] {
            let err = parse_grid(bad).unwrap_err();
            assert_eq!(err.exit_code(), EXIT_USAGE, "{bad}");
        }
    }

    #[test]
    fn hyperparameter_overrides_parse_and_validate() {
        let mut spec = ModelSpec::new(ModelFamily::Gbt);
        apply_hyperparameters(&mut spec, &["rounds=330".to_string()]).unwrap();
        assert_eq!(spec.get("rounds"), 330.0);

        let mut spec = ModelSpec::new(ModelFamily::Gbt);
        for bad in ["rounds", "rounds=abc", "k=3"] {
            let err = apply_hyperparameters(&mut spec, &[bad.to_string()]).unwrap_err();
            assert_eq!(err.exit_code(), EXIT_USAGE, "{bad}");
        }
    }

    #[test]
    fn verdict_event_serializes_with_exact_fields() {
        let event = VerdictEvent {
            window_index: 3,
            start_seconds: 3.0,
            label: Label::Fake,
            score: 0.875,
            inference_ms: 0.25,
        };
        let json = serde_json::to_string(&event).unwrap();
        assert_eq!(
            json,
            r#"{"window_index":3,"start_seconds":3.0,"label":"FAKE","score":0.875,"inference_ms":0.25}"#
        );
    }

    #[test]
    fn manifest_parses_with_optional_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.csv");
        fs::write(&path, "path,label\na.wav,REAL\nb.wav, fake \n\n").unwrap();
        let jobs = read_manifest(&path).unwrap();
        assert_eq!(
            jobs,
            vec![
                (PathBuf::from("a.wav"), Label::Real),
                (PathBuf::from("b.wav"), Label::Fake),
            ]
        );

        fs::write(&path, "a.wav,REAL\nb.wav,SPOOF\n").unwrap();
        let err = read_manifest(&path).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_DATA);
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn error_buckets_map_to_exit_codes() {
        let usage: CliError = ModelError::UnknownFamily("svm".to_string()).into();
        assert_eq!(usage.exit_code(), EXIT_USAGE);
        let data: CliError = ModelError::CorruptModelFile("bad".to_string()).into();
        assert_eq!(data.exit_code(), EXIT_DATA);
        let eval_usage: CliError = EvalError::NotSweepable(ModelFamily::Lda).into();
        assert_eq!(eval_usage.exit_code(), EXIT_USAGE);
        let eval_data: CliError = EvalError::SingleClass.into();
        assert_eq!(eval_data.exit_code(), EXIT_DATA);
    }
}
