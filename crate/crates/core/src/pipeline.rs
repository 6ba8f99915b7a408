//! The generalised signature method: for every augmented branch `i` and
//! window `j`,
//!
//! ```text
//! z_{i,j} = (ρ_post ∘ S^N ∘ ρ_pre ∘ W^j ∘ φ^i)(x)
//! ```
//!
//! Stage order is fixed. Windows are taken on the augmented series, so a
//! basepoint is prepended once to the whole series and not per window.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::augment::{AugmentStep, AugmentationSpec};
use crate::error::{Error, Result};
use crate::lyndon::LyndonBasis;
use crate::rescale::{rescale_post, rescale_pre, RescaleSpec};
use crate::series::TimeSeries;
use crate::signature::{self, feature_names, transform_len};
use crate::window::WindowSpec;

pub use crate::signature::Transform;

/// Experiments predicting more features than this are refused by default.
pub const DEFAULT_FEATURE_LIMIT: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Layout {
    /// One vector per sample, blocks `z_{i,j}` in `i`-major, `j`-minor order.
    #[default]
    Flat,
    /// One row per window `j`, holding `z_{1,j}, .., z_{p,j}`.
    PerWindowSequence,
}

impl Layout {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "flat" => Ok(Layout::Flat),
            "per-window-sequence" | "sequence" => Ok(Layout::PerWindowSequence),
            other => Err(Error::InvalidSpec(format!(
                "unknown layout {other:?}, expected flat or per-window-sequence"
            ))),
        }
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Layout::Flat => "flat",
            Layout::PerWindowSequence => "per-window-sequence",
        })
    }
}

impl Transform {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "signature" | "sig" => Ok(Transform::Signature),
            "logsignature" | "logsig" => Ok(Transform::LogSignature),
            other => Err(Error::InvalidSpec(format!(
                "unknown transform {other:?}, expected signature or logsignature"
            ))),
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Transform::Signature => "signature",
            Transform::LogSignature => "logsignature",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub augmentation: AugmentationSpec,
    pub window: WindowSpec,
    pub transform: Transform,
    pub depth: usize,
    pub rescale: RescaleSpec,
    pub feature_limit: usize,
    pub layout: Layout,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            augmentation: AugmentationSpec::none(),
            window: WindowSpec::Global,
            transform: Transform::Signature,
            depth: 1,
            rescale: RescaleSpec::None,
            feature_limit: DEFAULT_FEATURE_LIMIT,
            layout: Layout::Flat,
        }
    }
}

/// Shape of a pipeline's output: `p` branches of dimension `e`, `w` windows
/// each, `block_len` features per window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureShape {
    pub branches: usize,
    pub windows: usize,
    pub channels: usize,
    pub block_len: usize,
}

impl FeatureShape {
    pub fn width(&self) -> usize {
        self.branches
            .saturating_mul(self.windows)
            .saturating_mul(self.block_len)
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.depth == 0 {
            return Err(Error::InvalidSpec("depth must be at least 1".into()));
        }
        if self.feature_limit == 0 {
            return Err(Error::InvalidSpec("feature_limit must be positive".into()));
        }
        self.window.validate()
    }

    /// The canonical pipeline: time then basepoint augmentation (each
    /// dropped when the problem is known to be invariant to it), a dyadic
    /// window of depth `q` and the depth-`N` signature, no rescaling.
    pub fn canonical(
        depth: usize,
        dyadic_depth: usize,
        parametrization_invariant: bool,
        translation_invariant: bool,
    ) -> Self {
        let mut steps = Vec::new();
        if !parametrization_invariant {
            steps.push(AugmentStep::Time);
        }
        if !translation_invariant {
            steps.push(AugmentStep::Basepoint);
        }
        Self {
            augmentation: AugmentationSpec::new(steps).expect("time/basepoint chain is valid"),
            window: WindowSpec::Dyadic { depth: dyadic_depth },
            transform: Transform::Signature,
            depth,
            rescale: RescaleSpec::None,
            ..Self::default()
        }
    }

    /// Output shape for a `d`-channel input of length `n`, computed without
    /// touching any data.
    pub fn shape(&self, d: usize, n: usize) -> Result<FeatureShape> {
        self.validate()?;
        let (channels, branches, len) = self.augmentation.output_shape(d, n)?;
        let windows = self.window.count(len)?;
        Ok(FeatureShape {
            branches,
            windows,
            channels,
            block_len: transform_len(self.transform, channels, self.depth),
        })
    }

    /// Total feature width for a `d`-channel input of length `n`.
    pub fn predict_feature_count(&self, d: usize, n: usize) -> Result<usize> {
        Ok(self.shape(d, n)?.width())
    }

    /// Fails with [`Error::FeatureBudget`] when the predicted width exceeds
    /// the configured limit.
    pub fn check_budget(&self, d: usize, n: usize) -> Result<FeatureShape> {
        let shape = self.shape(d, n)?;
        if shape.width() > self.feature_limit {
            return Err(Error::FeatureBudget {
                predicted: shape.width(),
                limit: self.feature_limit,
            });
        }
        Ok(shape)
    }
}

/// Features of one series: blocks `z_{i,j}` stored `i`-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    pub shape: FeatureShape,
    blocks: Vec<Vec<f64>>,
    names: Vec<String>,
}

impl FeatureSet {
    pub fn block(&self, branch: usize, window: usize) -> &[f64] {
        &self.blocks[branch * self.shape.windows + window]
    }

    pub fn width(&self) -> usize {
        self.shape.width()
    }

    /// Per-block feature names (`sig(..)` / `logsig[..]`).
    pub fn block_names(&self) -> &[String] {
        &self.names
    }

    pub fn flat(&self) -> Vec<f64> {
        self.blocks.iter().flatten().copied().collect()
    }

    /// `a{i}|w{j}|<name>` with 1-based `i` and `j`, aligned with [`flat`](Self::flat).
    pub fn column_names(&self) -> Vec<String> {
        flat_column_names(&self.shape, &self.names)
    }

    /// Rows in window order; row `j` concatenates `z_{1,j}, .., z_{p,j}`.
    pub fn sequence(&self) -> Vec<Vec<f64>> {
        (0..self.shape.windows)
            .map(|j| {
                (0..self.shape.branches)
                    .flat_map(|i| self.block(i, j).iter().copied())
                    .collect()
            })
            .collect()
    }

    /// `a{i}|<name>`, aligned with each row of [`sequence`](Self::sequence).
    pub fn sequence_column_names(&self) -> Vec<String> {
        sequence_column_names(&self.shape, &self.names)
    }
}

pub fn flat_column_names(shape: &FeatureShape, names: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(shape.width());
    for i in 1..=shape.branches {
        for j in 1..=shape.windows {
            out.extend(names.iter().map(|n| format!("a{i}|w{j}|{n}")));
        }
    }
    out
}

pub fn sequence_column_names(shape: &FeatureShape, names: &[String]) -> Vec<String> {
    (1..=shape.branches)
        .flat_map(|i| names.iter().map(move |n| format!("a{i}|{n}")))
        .collect()
}

/// A pipeline bound to an input dimension, with the Lyndon basis and the
/// feature names prepared once for reuse across samples.
#[derive(Debug, Clone)]
pub struct Extractor {
    config: PipelineConfig,
    dim: usize,
    channels: usize,
    basis: Option<LyndonBasis>,
    names: Vec<String>,
}

impl Extractor {
    pub fn new(config: PipelineConfig, dim: usize) -> Result<Self> {
        config.validate()?;
        // length is irrelevant to the channel count; 2 is the shortest valid path
        let (channels, _, _) = config.augmentation.output_shape(dim, 2)?;
        let basis = match config.transform {
            Transform::LogSignature => Some(LyndonBasis::new(channels, config.depth)),
            Transform::Signature => None,
        };
        let names = feature_names(channels, config.depth, config.transform);
        Ok(Self {
            config,
            dim,
            channels,
            basis,
            names,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn block_names(&self) -> &[String] {
        &self.names
    }

    pub fn run(&self, ts: &TimeSeries) -> Result<FeatureSet> {
        if ts.dim() != self.dim {
            return Err(Error::mismatch(format!("{} channels", self.dim), ts.dim()));
        }
        let cfg = &self.config;
        let shape = cfg.check_budget(ts.dim(), ts.len())?;
        let branches = cfg.augmentation.apply(ts)?;
        let mut blocks = Vec::with_capacity(shape.branches * shape.windows);
        for branch in &branches {
            for window in cfg.window.apply(branch)? {
                let window = match cfg.rescale {
                    RescaleSpec::Pre => rescale_pre(&window, cfg.depth)?,
                    _ => window,
                };
                let z = signature::transform(&window, cfg.transform, cfg.depth, self.basis.as_ref())?;
                let z = match cfg.rescale {
                    RescaleSpec::Post => rescale_post(&z, self.channels, cfg.depth, cfg.transform)?,
                    _ => z,
                };
                blocks.push(z);
            }
        }
        debug_assert_eq!(blocks.len(), shape.branches * shape.windows);
        Ok(FeatureSet {
            shape,
            blocks,
            names: self.names.clone(),
        })
    }
}

pub fn run_pipeline(config: &PipelineConfig, ts: &TimeSeries) -> Result<FeatureSet> {
    Extractor::new(config.clone(), ts.dim())?.run(ts)
}

pub fn run_canonical(
    ts: &TimeSeries,
    depth: usize,
    dyadic_depth: usize,
    parametrization_invariant: bool,
    translation_invariant: bool,
) -> Result<FeatureSet> {
    let config = PipelineConfig::canonical(depth, dyadic_depth, parametrization_invariant, translation_invariant);
    run_pipeline(&config, ts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::augment_time;
    use crate::rescale::rescale_pre;
    use crate::signature::signature;

    fn toy(n: usize, d: usize) -> TimeSeries {
        let values = (0..n * d).map(|i| ((i * 7 % 11) as f64) * 0.3 - 1.0).collect();
        TimeSeries::with_default_times(d, values).unwrap()
    }

    #[test]
    fn baseline_equals_manual_composition() {
        let ts = toy(9, 2);
        let cfg = PipelineConfig {
            augmentation: AugmentationSpec::parse("time").unwrap(),
            depth: 3,
            rescale: RescaleSpec::Pre,
            ..PipelineConfig::default()
        };
        let got = run_pipeline(&cfg, &ts).unwrap().flat();
        let manual = signature(&rescale_pre(&augment_time(&ts), 3).unwrap(), 3)
            .unwrap()
            .values;
        assert_eq!(got, manual);
        assert_eq!(got.len(), 39);
    }

    #[test]
    fn displacement_only() {
        let ts = TimeSeries::from_rows(&[[0.0, 0.0], [1.0, 2.0]]).unwrap();
        let f = run_pipeline(&PipelineConfig::default(), &ts).unwrap();
        assert_eq!(f.flat(), vec![1.0, 2.0]);
        assert_eq!(f.column_names(), vec!["a1|w1|sig(1)", "a1|w1|sig(2)"]);
    }

    #[test]
    fn dyadic_with_time_and_basepoint() {
        let cfg = PipelineConfig {
            augmentation: AugmentationSpec::parse("time,basepoint").unwrap(),
            window: WindowSpec::Dyadic { depth: 2 },
            depth: 2,
            ..PipelineConfig::default()
        };
        let f = run_pipeline(&cfg, &toy(8, 2)).unwrap();
        assert_eq!(f.width(), 36);
        assert_eq!(f.flat().len(), 36);
        assert_eq!(cfg.predict_feature_count(2, 8).unwrap(), 36);
    }

    #[test]
    fn canonical_widths() {
        let ts = toy(8, 2);
        assert_eq!(run_canonical(&ts, 2, 2, false, false).unwrap().width(), 36);
        assert_eq!(run_canonical(&ts, 2, 2, true, false).unwrap().width(), 18);
        assert_eq!(
            PipelineConfig::canonical(2, 3, false, false)
                .predict_feature_count(2, 8)
                .unwrap(),
            84
        );
    }

    #[test]
    fn canonical_matches_explicit_config() {
        let ts = toy(13, 3);
        let explicit = PipelineConfig {
            augmentation: AugmentationSpec::parse("time,basepoint").unwrap(),
            window: WindowSpec::Dyadic { depth: 3 },
            transform: Transform::Signature,
            depth: 3,
            rescale: RescaleSpec::None,
            feature_limit: DEFAULT_FEATURE_LIMIT,
            layout: Layout::Flat,
        };
        assert_eq!(
            run_canonical(&ts, 3, 3, false, false).unwrap(),
            run_pipeline(&explicit, &ts).unwrap()
        );
    }

    #[test]
    fn logsignature_width() {
        let cfg = PipelineConfig {
            augmentation: AugmentationSpec::parse("time").unwrap(),
            transform: Transform::LogSignature,
            depth: 3,
            ..PipelineConfig::default()
        };
        assert_eq!(cfg.predict_feature_count(1, 10).unwrap(), 5);
        assert_eq!(run_pipeline(&cfg, &toy(10, 1)).unwrap().width(), 5);
    }

    #[test]
    fn budget_guard() {
        let cfg = PipelineConfig {
            feature_limit: 10,
            ..PipelineConfig::canonical(2, 2, false, false)
        };
        assert_eq!(
            run_pipeline(&cfg, &toy(8, 2)),
            Err(Error::FeatureBudget {
                predicted: 36,
                limit: 10
            })
        );
    }

    #[test]
    fn sequence_layout_orders_windows() {
        let cfg = PipelineConfig {
            window: WindowSpec::Sliding { length: 3, step: 2 },
            depth: 2,
            layout: Layout::PerWindowSequence,
            ..PipelineConfig::default()
        };
        let ts = toy(9, 2);
        let f = run_pipeline(&cfg, &ts).unwrap();
        let rows = f.sequence();
        assert_eq!(rows.len(), 4);
        for (j, row) in rows.iter().enumerate() {
            let expected = signature(&ts.slice(2 * j, 2 * j + 3), 2).unwrap().values;
            assert_eq!(row, &expected);
        }
        assert_eq!(f.sequence_column_names().len(), 6);
    }

    #[test]
    fn parse_enums() {
        assert_eq!(Transform::parse("logsig").unwrap(), Transform::LogSignature);
        assert_eq!(Layout::parse("per-window-sequence").unwrap(), Layout::PerWindowSequence);
        assert!(Layout::parse("grid").is_err());
    }
}
