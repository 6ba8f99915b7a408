//! Run configuration files.
//!
//! ```toml
//! version = 1
//! seed = 7
//!
//! [input]
//! path = "toy8.ts"
//!
//! [pipeline]
//! augmentation = "time,basepoint"
//! window = "dyadic(2)"
//! depth = 2
//!
//! [output]
//! path = "features.csv"
//! ```
//!
//! Every key can be overridden on the command line by its dotted name, for
//! example `--pipeline.depth 3` or `--output.format=ndjson`. Relative paths
//! are resolved against the directory containing the config file.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use sigpipe_core::pipeline::DEFAULT_FEATURE_LIMIT;
use sigpipe_core::{AugmentationSpec, Layout, PipelineConfig, RescaleSpec, Transform, WindowSpec};

use crate::dataset::Split;
use crate::error::{Error, Result};
use crate::features::OutputFormat;

pub const CONFIG_VERSION: i64 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    version: i64,
    #[serde(default)]
    seed: u64,
    input: RawInput,
    #[serde(default)]
    pipeline: RawPipeline,
    #[serde(default)]
    normalization: RawNormalization,
    #[serde(default)]
    output: RawOutput,
    #[serde(default)]
    parallelism: RawParallelism,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInput {
    path: PathBuf,
    format: Option<String>,
    split: Option<String>,
    channels: Option<usize>,
    length: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPipeline {
    #[serde(default = "default_augmentation")]
    augmentation: String,
    #[serde(default = "default_window")]
    window: String,
    #[serde(default = "default_transform")]
    transform: String,
    #[serde(default = "default_depth")]
    depth: usize,
    #[serde(default = "default_rescale")]
    rescale: String,
    #[serde(default = "default_feature_limit")]
    feature_limit: usize,
    #[serde(default = "default_layout")]
    layout: String,
}

fn default_augmentation() -> String {
    "none".into()
}
fn default_window() -> String {
    "global".into()
}
fn default_transform() -> String {
    "signature".into()
}
fn default_depth() -> usize {
    2
}
fn default_rescale() -> String {
    "none".into()
}
fn default_feature_limit() -> usize {
    DEFAULT_FEATURE_LIMIT
}
fn default_layout() -> String {
    "flat".into()
}

impl Default for RawPipeline {
    fn default() -> Self {
        Self {
            augmentation: default_augmentation(),
            window: default_window(),
            transform: default_transform(),
            depth: default_depth(),
            rescale: default_rescale(),
            feature_limit: default_feature_limit(),
            layout: default_layout(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNormalization {
    #[serde(default)]
    enabled: bool,
    fit_path: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<PathBuf>,
    format: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParallelism {
    #[serde(default)]
    workers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Ts,
    CsvLong,
}

impl InputFormat {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "ts" => Ok(InputFormat::Ts),
            "csv" | "csv_long" | "csv-long" => Ok(InputFormat::CsvLong),
            other => Err(Error::Config(format!(
                "unknown input format {other:?}, expected ts or csv"
            ))),
        }
    }

    /// Guesses the format from the file extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref()
        {
            Some("ts") => Ok(InputFormat::Ts),
            Some("csv") => Ok(InputFormat::CsvLong),
            _ => Err(Error::Config(format!(
                "cannot infer the format of {}; set input.format to ts or csv",
                path.display()
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InputPlan {
    pub path: PathBuf,
    pub format: InputFormat,
    pub split: Split,
    /// Channel count and series length declared for planning without data.
    pub channels: Option<usize>,
    pub length: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationPlan {
    pub enabled: bool,
    /// Dataset to fit statistics on; the input itself when absent.
    pub fit_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputPlan {
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
}

/// A validated run: the pipeline plus the I/O plan around it.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub input: InputPlan,
    pub pipeline: PipelineConfig,
    pub normalization: NormalizationPlan,
    pub output: OutputPlan,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
}

fn spec<T>(key: &str, r: sigpipe_core::Result<T>) -> Result<T> {
    r.map_err(|e| Error::Config(format!("{key}: {e}")))
}

impl RunConfig {
    pub fn from_toml(text: &str, base_dir: &Path, overrides: &[(String, String)]) -> Result<Self> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        for (key, value) in overrides {
            apply_override(&mut table, key, value)?;
        }
        if let Some(v) = table.get("version") {
            match v.as_integer() {
                Some(CONFIG_VERSION) => {}
                _ => {
                    return Err(Error::Config(format!(
                        "unsupported config version {v}, this build reads version {CONFIG_VERSION}"
                    )))
                }
            }
        }
        let raw: RawConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        Self::from_raw(raw, base_dir)
    }

    pub fn load(path: impl AsRef<Path>, overrides: &[(String, String)]) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base, overrides).map_err(|e| e.in_file(path))
    }

    fn from_raw(raw: RawConfig, base: &Path) -> Result<Self> {
        if raw.version != CONFIG_VERSION {
            return Err(Error::Config(format!("unsupported config version {}", raw.version)));
        }
        let resolve = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
        let p = raw.pipeline;
        let augmentation = spec("pipeline.augmentation", AugmentationSpec::parse(&p.augmentation))?.with_seed(raw.seed);
        let pipeline = PipelineConfig {
            augmentation,
            window: spec("pipeline.window", WindowSpec::parse(&p.window))?,
            transform: spec("pipeline.transform", Transform::parse(&p.transform))?,
            depth: p.depth,
            rescale: spec("pipeline.rescale", RescaleSpec::parse(&p.rescale))?,
            feature_limit: p.feature_limit,
            layout: spec("pipeline.layout", Layout::parse(&p.layout))?,
        };
        spec("pipeline", pipeline.validate())?;

        let input_path = resolve(raw.input.path);
        let format = match raw.input.format {
            Some(f) => InputFormat::parse(&f)?,
            None => InputFormat::from_path(&input_path)?,
        };
        let split = raw
            .input
            .split
            .as_deref()
            .map(Split::parse)
            .transpose()?
            .unwrap_or_default();
        if raw.input.channels == Some(0) || raw.input.length.is_some_and(|n| n < 2) {
            return Err(Error::Config(
                "input.channels must be positive and input.length at least 2".into(),
            ));
        }
        let normalization = NormalizationPlan {
            enabled: raw.normalization.enabled,
            fit_path: raw.normalization.fit_path.map(resolve),
        };
        if normalization.fit_path.is_none() && normalization.enabled && split == Split::Test {
            return Err(Error::Config(
                "normalization on a test split needs normalization.fit_path pointing at training data".into(),
            ));
        }
        let output = OutputPlan {
            path: raw.output.path.map(resolve),
            format: raw
                .output
                .format
                .as_deref()
                .map(OutputFormat::parse)
                .transpose()?
                .unwrap_or_default(),
        };
        Ok(Self {
            seed: raw.seed,
            input: InputPlan {
                path: input_path,
                format,
                split,
                channels: raw.input.channels,
                length: raw.input.length,
            },
            pipeline,
            normalization,
            output,
            workers: raw.parallelism.workers,
        })
    }
}

/// Sets `section.key` (or a top-level `key`) in `table`. Values replacing a
/// string stay strings; anything else is parsed as a TOML value first.
fn apply_override(table: &mut toml::Table, key: &str, value: &str) -> Result<()> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) || parts.len() > 2 {
        return Err(Error::Config(format!("invalid override key {key:?}")));
    }
    let (section, leaf) = match parts.as_slice() {
        [leaf] => (table, *leaf),
        [section, leaf] => {
            let entry = table
                .entry(section.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            let toml::Value::Table(t) = entry else {
                return Err(Error::Config(format!("override {key:?}: {section} is not a section")));
            };
            (t, *leaf)
        }
        _ => unreachable!("length checked above"),
    };
    let parsed = match section.get(leaf) {
        Some(toml::Value::String(_)) => toml::Value::String(value.to_string()),
        _ => parse_scalar(value),
    };
    section.insert(leaf.to_string(), parsed);
    Ok(())
}

fn parse_scalar(value: &str) -> toml::Value {
    format!("v = {value}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()))
}

/// Splits `--a.b value` / `--a.b=value` pairs out of raw arguments.
pub fn parse_overrides(args: &[String]) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let Some(flag) = arg.strip_prefix("--") else {
            return Err(Error::Config(format!("unexpected argument {arg:?}")));
        };
        match flag.split_once('=') {
            Some((k, v)) => out.push((k.to_string(), v.to_string())),
            None => {
                let v = it
                    .next()
                    .ok_or_else(|| Error::Config(format!("override --{flag} needs a value")))?;
                out.push((flag.to_string(), v.clone()));
            }
        }
    }
    Ok(out)
}
