//! The `sigpipe` command line.
//!
//! Exit codes: 0 success, 1 internal error, 2 invalid configuration,
//! 3 unreadable or malformed input, 4 feature budget exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use sigpipe_core::{Extractor, FeatureShape, TimeSeries};

use crate::config::{parse_overrides, InputFormat, RunConfig};
use crate::csv_long::parse_csv_long;
use crate::dataset::{fit_normalizer, LabeledDataset, Split};
use crate::error::{Error, Result};
use crate::features::{write_features, FeatureTable};
use crate::selftest::{self, SelftestOptions};
use crate::ts_format::parse_ts_file;

pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "sigpipe", version, about = "Signature features for multivariate time series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the pipeline described by a config file and write the features.
    Extract {
        config: PathBuf,
        /// Print the predicted feature width from input.channels and
        /// input.length without reading the dataset.
        #[arg(long)]
        dry_run: bool,
        /// Config overrides as `--section.key value` or `--section.key=value`.
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "OVERRIDES")]
        overrides: Vec<String>,
    },
    /// Summarize a dataset: lengths, channels, classes and sampling.
    Inspect {
        path: PathBuf,
        /// `ts` or `csv`; inferred from the extension by default.
        #[arg(long)]
        format: Option<String>,
    },
    /// Check the algebraic laws of the signature on synthetic data.
    Selftest {
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

pub fn exit_code(err: &Error) -> i32 {
    use sigpipe_core::Error as Core;
    match err.root() {
        Error::Config(_) | Error::Normalization(_) => EXIT_CONFIG,
        Error::Io { .. } | Error::Parse { .. } | Error::Csv(_) | Error::Json(_) => EXIT_INPUT,
        Error::Core(Core::FeatureBudget { .. }) => EXIT_BUDGET,
        Error::Core(
            Core::InvalidSpec(_) | Core::InvalidProjection { .. } | Core::EmptyWindow { .. } | Core::TooShort { .. },
        ) => EXIT_CONFIG,
        _ => EXIT_INTERNAL,
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Extract {
            config,
            dry_run,
            mut overrides,
        } => {
            let before = overrides.len();
            overrides.retain(|a| a != "--dry-run");
            let dry_run = dry_run || overrides.len() != before;
            parse_overrides(&overrides)
                .and_then(|ov| RunConfig::load(&config, &ov))
                .and_then(|cfg| if dry_run { plan(&cfg) } else { extract(&cfg) })
        }
        Command::Inspect { path, format } => inspect(&path, format.as_deref()),
        Command::Selftest {
            quick,
            seed,
            inject_fault,
        } => {
            let report = selftest::run(SelftestOptions {
                quick,
                inject_fault,
                seed,
            });
            for law in &report.laws {
                println!("{law}");
            }
            if report.ok() {
                println!("all laws hold");
                return 0;
            }
            eprintln!("selftest failed");
            return EXIT_INTERNAL;
        }
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn load_dataset(path: &Path, format: InputFormat) -> Result<LabeledDataset> {
    match format {
        InputFormat::Ts => parse_ts_file(path),
        InputFormat::CsvLong => parse_csv_long(path),
    }
}

fn describe(shape: &FeatureShape) -> String {
    format!(
        "p={} w={} e={} block={} per_branch={}",
        shape.branches,
        shape.windows,
        shape.channels,
        shape.block_len,
        shape.windows * shape.block_len
    )
}

fn plan(cfg: &RunConfig) -> Result<()> {
    let (Some(d), Some(n)) = (cfg.input.channels, cfg.input.length) else {
        return Err(Error::Config(
            "--dry-run needs input.channels and input.length in the config or as overrides".into(),
        ));
    };
    let shape = cfg.pipeline.check_budget(d, n)?;
    println!("d={d} n={n} {} predicted_width={}", describe(&shape), shape.width());
    Ok(())
}

fn normalize(cfg: &RunConfig, dataset: LabeledDataset) -> Result<LabeledDataset> {
    if !cfg.normalization.enabled || dataset.is_empty() {
        return Ok(dataset);
    }
    let stats = match &cfg.normalization.fit_path {
        Some(path) => {
            let train =
                load_dataset(path, InputFormat::from_path(path).unwrap_or(cfg.input.format))?.with_split(Split::Train);
            fit_normalizer(&train)?
        }
        None => fit_normalizer(&dataset)?,
    };
    stats.apply(&dataset)
}

fn extract(cfg: &RunConfig) -> Result<()> {
    let started = Instant::now();
    let dataset = load_dataset(&cfg.input.path, cfg.input.format)?.with_split(cfg.input.split);
    let dataset = normalize(cfg, dataset)?;

    let d = dataset.dim().unwrap_or(cfg.input.channels.unwrap_or(1));
    let extractor = Extractor::new(cfg.pipeline.clone(), d)?;
    for s in &dataset.samples {
        cfg.pipeline.check_budget(d, s.len())?;
    }
    let predicted = dataset
        .samples
        .first()
        .map(|s| cfg.pipeline.predict_feature_count(d, s.len()))
        .transpose()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("parallelism.workers: {e}")))?;
    let sets = pool.install(|| {
        dataset
            .samples
            .par_iter()
            .map(|s: &TimeSeries| extractor.run(s))
            .collect::<sigpipe_core::Result<Vec<_>>>()
    })?;
    let table = FeatureTable::from_sets(&dataset.ids, &sets, &dataset.labels, cfg.pipeline.layout)?;

    let mut summary = format!("samples={} d={d}", dataset.len());
    if let (Some(first), Some(predicted)) = (sets.first(), predicted) {
        summary += &format!(
            " {} width={} predicted_width={predicted} realized_width={}",
            describe(&first.shape),
            first.width(),
            first.width()
        );
    }
    match &cfg.output.path {
        Some(path) => {
            write_features(&table, path, cfg.output.format)?;
            summary += &format!(" output={}", path.display());
            println!("{summary} time={:.3}s", started.elapsed().as_secs_f64());
        }
        None => {
            let stdout = std::io::stdout();
            table.write(stdout.lock(), cfg.output.format)?;
            eprintln!("{summary} time={:.3}s", started.elapsed().as_secs_f64());
        }
    }
    Ok(())
}

fn inspect(path: &Path, format: Option<&str>) -> Result<()> {
    let format = match format {
        Some(f) => InputFormat::parse(f)?,
        None => InputFormat::from_path(path)?,
    };
    let ds = load_dataset(path, format)?;
    let mut out = std::io::stdout().lock();
    let io = |e| Error::io("<stdout>", e);
    writeln!(out, "file: {}", path.display()).map_err(io)?;
    if let Some(name) = &ds.name {
        writeln!(out, "problem: {name}").map_err(io)?;
    }
    writeln!(out, "samples: {}", ds.len()).map_err(io)?;
    let Some(d) = ds.dim() else {
        return Ok(());
    };
    writeln!(out, "channels: {d}").map_err(io)?;
    let lengths = ds.samples.iter().map(TimeSeries::len);
    let (lo, hi) = (lengths.clone().min().unwrap_or(0), lengths.max().unwrap_or(0));
    writeln!(out, "length: {lo}..{hi}").map_err(io)?;

    let mut classes: Vec<(String, usize)> = Vec::new();
    for label in ds.labels.iter().flatten() {
        match classes.iter_mut().find(|(c, _)| c == label) {
            Some((_, count)) => *count += 1,
            None => classes.push((label.clone(), 1)),
        }
    }
    if classes.is_empty() {
        writeln!(out, "classes: none").map_err(io)?;
    } else {
        writeln!(out, "classes: {}", classes.len()).map_err(io)?;
        for (c, count) in &classes {
            writeln!(out, "  {c}: {count}").map_err(io)?;
        }
    }

    let steps = ds
        .samples
        .iter()
        .flat_map(|s| s.timestamps().windows(2).map(|w| w[1] - w[0]).collect::<Vec<_>>());
    let (min, max) = steps.fold((f64::INFINITY, 0.0f64), |(lo, hi), s| (lo.min(s), hi.max(s)));
    if !min.is_finite() {
        writeln!(out, "sampling: single observations").map_err(io)?;
    } else if max - min <= 1e-9 * max {
        writeln!(out, "sampling: regular (step {min})").map_err(io)?;
    } else {
        writeln!(out, "sampling: irregular (min step {min}, max step {max})").map_err(io)?;
    }
    Ok(())
}
