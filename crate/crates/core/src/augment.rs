//! Augmentations `φ: S(R^d) → S(R^e)^p`, applied before windowing.
//!
//! Steps compose left-to-right. Single-output steps (time, basepoint,
//! invisibility-reset, lead-lag) can be chained freely; a fan-out step
//! (coordinate or affine projection) may only close the chain.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Seed used for random projections when neither the step nor the caller
/// provides one.
pub const DEFAULT_SEED: u64 = 0;

/// One affine map `x ↦ A x + b` with `A` stored row-major as `e × d`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    pub matrix: Vec<f64>,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AffineSource {
    /// Matrices drawn i.i.d. `N(0, 1/d)` from a ChaCha8 stream, zero bias.
    /// `None` means "use the run-level seed".
    Seeded(Option<u64>),
    Explicit(Vec<AffineMap>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum AugmentStep {
    Time,
    Basepoint,
    InvisibilityReset,
    LeadLag { lags: Vec<usize> },
    CoordinateProjection { k: usize, include_time: bool },
    AffineProjection { e: usize, p: usize, source: AffineSource },
}

impl AugmentStep {
    fn fans_out(&self) -> bool {
        match self {
            AugmentStep::CoordinateProjection { .. } => true,
            AugmentStep::AffineProjection { p, .. } => *p > 1,
            _ => false,
        }
    }

    /// `(e, p, n_out)` for an input of dimension `d` and length `n`.
    pub fn output_shape(&self, d: usize, n: usize) -> Result<(usize, usize, usize)> {
        Ok(match self {
            AugmentStep::Time => (d + 1, 1, n),
            AugmentStep::Basepoint => (d, 1, n + 1),
            AugmentStep::InvisibilityReset => (d + 1, 1, n + 2),
            AugmentStep::LeadLag { lags } => {
                if n < 2 {
                    return Err(Error::TooShort { needed: 2, found: n });
                }
                ((lags.len() + 1) * d, 1, 2 * n - 1)
            }
            AugmentStep::CoordinateProjection { k, include_time } => {
                if *k == 0 || *k > 3 || *k > d {
                    return Err(Error::InvalidProjection { k: *k, dim: d });
                }
                let count = (0..*k).map(|i| d - i).product();
                (k + usize::from(*include_time), count, n)
            }
            AugmentStep::AffineProjection { e, p, .. } => (*e, *p, n),
        })
    }

    fn apply(&self, ts: &TimeSeries, seed: u64) -> Result<Vec<TimeSeries>> {
        Ok(match self {
            AugmentStep::Time => vec![augment_time(ts)],
            AugmentStep::Basepoint => vec![augment_basepoint(ts)],
            AugmentStep::InvisibilityReset => vec![augment_invisibility_reset(ts)],
            AugmentStep::LeadLag { lags } => vec![augment_lead_lag(ts, lags)?],
            AugmentStep::CoordinateProjection { k, include_time } => {
                augment_coordinate_projection(ts, *k, *include_time)?
            }
            AugmentStep::AffineProjection { e, p, source } => {
                let maps = match source {
                    AffineSource::Seeded(s) => random_affine_maps(ts.dim(), *e, *p, s.unwrap_or(seed)),
                    AffineSource::Explicit(maps) => maps.clone(),
                };
                if maps.len() != *p {
                    return Err(Error::mismatch(alloc::format!("{p} affine maps"), maps.len()));
                }
                augment_affine_projection(ts, *e, &maps)?
            }
        })
    }
}

/// Ordered augmentation chain.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AugmentationSpec {
    steps: Vec<AugmentStep>,
    seed: Option<u64>,
}

impl AugmentationSpec {
    pub fn new(steps: Vec<AugmentStep>) -> Result<Self> {
        if let Some(pos) = steps.iter().position(AugmentStep::fans_out) {
            if pos + 1 != steps.len() {
                return Err(Error::InvalidSpec(
                    "a projection producing several series must be the last augmentation step".into(),
                ));
            }
        }
        for step in &steps {
            match step {
                AugmentStep::LeadLag { lags } if lags.is_empty() || lags.contains(&0) => {
                    return Err(Error::InvalidSpec("lead-lag lags must be positive".into()));
                }
                AugmentStep::CoordinateProjection { k, .. } if *k == 0 || *k > 3 => {
                    return Err(Error::InvalidSpec(
                        "coordinate projection tuple size must be 1, 2 or 3".into(),
                    ));
                }
                AugmentStep::AffineProjection { e, p, .. } if *e == 0 || *p == 0 => {
                    return Err(Error::InvalidSpec("affine projection needs e >= 1 and p >= 1".into()));
                }
                _ => {}
            }
        }
        Ok(Self { steps, seed: None })
    }

    pub fn none() -> Self {
        Self::default()
    }

    /// Seed for random projections that do not carry their own.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn steps(&self) -> &[AugmentStep] {
        &self.steps
    }

    /// `(e, p, n_out)` of the whole chain.
    pub fn output_shape(&self, d: usize, n: usize) -> Result<(usize, usize, usize)> {
        let (mut e, mut p, mut len) = (d, 1, n);
        for step in &self.steps {
            let (e2, p2, n2) = step.output_shape(e, len)?;
            e = e2;
            p *= p2;
            len = n2;
        }
        Ok((e, p, len))
    }

    /// Folds the steps over `ts`; always returns at least one series.
    pub fn apply(&self, ts: &TimeSeries) -> Result<Vec<TimeSeries>> {
        let seed = self.seed.unwrap_or(DEFAULT_SEED);
        let mut current = vec![ts.clone()];
        for step in &self.steps {
            let mut next = Vec::new();
            for s in &current {
                next.extend(step.apply(s, seed)?);
            }
            current = next;
        }
        Ok(current)
    }

    /// Parses the textual form, e.g. `time,basepoint` or `time,leadlag(1)`.
    /// The empty string and `none` denote the empty chain.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() || text.eq_ignore_ascii_case("none") {
            return Ok(Self::none());
        }
        let steps = split_top_level(text)?
            .into_iter()
            .map(parse_step)
            .collect::<Result<Vec<_>>>()?;
        Self::new(steps)
    }
}

impl fmt::Display for AugmentationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            return f.write_str("none");
        }
        for (i, step) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            match step {
                AugmentStep::Time => f.write_str("time")?,
                AugmentStep::Basepoint => f.write_str("basepoint")?,
                AugmentStep::InvisibilityReset => f.write_str("invisibility")?,
                AugmentStep::LeadLag { lags } => {
                    f.write_str("leadlag(")?;
                    write_list(f, lags)?;
                    f.write_str(")")?;
                }
                AugmentStep::CoordinateProjection { k, include_time } => {
                    write!(f, "coordproj({k}{})", if *include_time { ",time" } else { "" })?
                }
                AugmentStep::AffineProjection { e, p, source } => match source {
                    AffineSource::Seeded(Some(s)) => write!(f, "randproj({e},{p},{s})")?,
                    AffineSource::Seeded(None) => write!(f, "randproj({e},{p})")?,
                    AffineSource::Explicit(_) => write!(f, "affine({e},{p})")?,
                },
            }
        }
        Ok(())
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, items: &[usize]) -> fmt::Result {
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

/// Splits on commas that are not inside parentheses.
pub(crate) fn split_top_level(text: &str) -> Result<Vec<&str>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::InvalidSpec(alloc::format!("unbalanced ')' in {text:?}")));
                }
            }
            ',' if depth == 0 => {
                parts.push(text[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::InvalidSpec(alloc::format!("unbalanced '(' in {text:?}")));
    }
    parts.push(text[start..].trim());
    Ok(parts)
}

/// Splits `name(a,b)` into `("name", ["a", "b"])`; a bare `name` has no args.
pub(crate) fn split_call(text: &str) -> Result<(String, Vec<&str>)> {
    let text = text.trim();
    match text.find('(') {
        None => Ok((text.to_ascii_lowercase(), Vec::new())),
        Some(open) => {
            let inner = text[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Error::InvalidSpec(alloc::format!("missing ')' in {text:?}")))?;
            let args = if inner.trim().is_empty() {
                Vec::new()
            } else {
                inner.split(',').map(str::trim).collect()
            };
            Ok((text[..open].trim().to_ascii_lowercase(), args))
        }
    }
}

pub(crate) fn parse_uint<T: core::str::FromStr>(arg: &str, what: &str) -> Result<T> {
    arg.parse()
        .map_err(|_| Error::InvalidSpec(alloc::format!("{what}: expected a non-negative integer, got {arg:?}")))
}

fn parse_step(text: &str) -> Result<AugmentStep> {
    let (name, args) = split_call(text)?;
    let no_args = |step: AugmentStep| {
        if args.is_empty() {
            Ok(step)
        } else {
            Err(Error::InvalidSpec(alloc::format!("{name} takes no arguments")))
        }
    };
    match name.as_str() {
        "time" => no_args(AugmentStep::Time),
        "basepoint" => no_args(AugmentStep::Basepoint),
        "invisibility" | "invisibility_reset" | "ir" => no_args(AugmentStep::InvisibilityReset),
        "leadlag" | "lead_lag" => {
            let lags = if args.is_empty() {
                vec![1]
            } else {
                args.iter()
                    .map(|a| parse_uint(a, "lead-lag lag"))
                    .collect::<Result<_>>()?
            };
            Ok(AugmentStep::LeadLag { lags })
        }
        "coordproj" => {
            let (k, include_time) = match args.as_slice() {
                [k] => (parse_uint(k, "coordinate projection size")?, false),
                [k, t] if t.eq_ignore_ascii_case("time") => (parse_uint(k, "coordinate projection size")?, true),
                _ => return Err(Error::InvalidSpec("expected coordproj(k) or coordproj(k,time)".into())),
            };
            Ok(AugmentStep::CoordinateProjection { k, include_time })
        }
        "randproj" => {
            let (e, p, seed) = match args.as_slice() {
                [e, p] => (
                    parse_uint(e, "projection dimension")?,
                    parse_uint(p, "projection count")?,
                    None,
                ),
                [e, p, s] => (
                    parse_uint(e, "projection dimension")?,
                    parse_uint(p, "projection count")?,
                    Some(parse_uint(s, "projection seed")?),
                ),
                _ => {
                    return Err(Error::InvalidSpec(
                        "expected randproj(e,p) or randproj(e,p,seed)".into(),
                    ))
                }
            };
            Ok(AugmentStep::AffineProjection {
                e,
                p,
                source: AffineSource::Seeded(seed),
            })
        }
        other => Err(Error::InvalidSpec(alloc::format!("unknown augmentation {other:?}"))),
    }
}

/// Prepends the timestamps as channel 0.
pub fn augment_time(ts: &TimeSeries) -> TimeSeries {
    let d = ts.dim();
    let mut values = Vec::with_capacity(ts.len() * (d + 1));
    for (row, &t) in ts.rows().zip(ts.timestamps()) {
        values.push(t);
        values.extend_from_slice(row);
    }
    TimeSeries::from_parts(d + 1, values, ts.timestamps().to_vec())
}

/// First step of the grid, or 1 for a single observation.
fn leading_step(times: &[f64]) -> f64 {
    if times.len() >= 2 {
        times[1] - times[0]
    } else {
        1.0
    }
}

fn trailing_step(times: &[f64]) -> f64 {
    let n = times.len();
    if n >= 2 {
        times[n - 1] - times[n - 2]
    } else {
        1.0
    }
}

/// Prepends the zero vector at `t_1 - (t_2 - t_1)`.
pub fn augment_basepoint(ts: &TimeSeries) -> TimeSeries {
    let d = ts.dim();
    let times = ts.timestamps();
    let mut values = vec![0.0; d];
    values.extend_from_slice(ts.values());
    let mut new_times = Vec::with_capacity(times.len() + 1);
    new_times.push(times[0] - leading_step(times));
    new_times.extend_from_slice(times);
    TimeSeries::from_parts(d, values, new_times)
}

/// `((1,x_1), .., (1,x_n), (0,x_n), (0,0))`; the two extra timestamps
/// continue the grid with its final step.
pub fn augment_invisibility_reset(ts: &TimeSeries) -> TimeSeries {
    let d = ts.dim();
    let n = ts.len();
    let mut values = Vec::with_capacity((n + 2) * (d + 1));
    for row in ts.rows() {
        values.push(1.0);
        values.extend_from_slice(row);
    }
    values.push(0.0);
    values.extend_from_slice(ts.row(n - 1));
    values.extend(core::iter::repeat_n(0.0, d + 1));
    let times = ts.timestamps();
    let step = trailing_step(times);
    let last = times[n - 1];
    let mut new_times = times.to_vec();
    new_times.push(last + step);
    new_times.push(last + 2.0 * step);
    TimeSeries::from_parts(d + 1, values, new_times)
}

/// Lead-lag staircase. The lead channels take the values
/// `x_1, x_2, x_2, x_3, x_3, .., x_n` over `2n - 1` points; the copy lagged by
/// `l` observations reads the lead `2l - 1` staircase points earlier, held at
/// `x_1` before that. Channel layout: lead block, then one block per lag.
/// Timestamps are re-indexed `1..=2n-1`.
pub fn augment_lead_lag(ts: &TimeSeries, lags: &[usize]) -> Result<TimeSeries> {
    let n = ts.len();
    if n < 2 {
        return Err(Error::TooShort { needed: 2, found: n });
    }
    if lags.is_empty() || lags.contains(&0) {
        return Err(Error::InvalidSpec("lead-lag lags must be positive".into()));
    }
    let d = ts.dim();
    let len = 2 * n - 1;
    let e = (lags.len() + 1) * d;
    let lead_row = |s: usize| s.div_ceil(2);
    let mut values = Vec::with_capacity(len * e);
    for s in 0..len {
        values.extend_from_slice(ts.row(lead_row(s)));
        for &lag in lags {
            let src = s.saturating_sub(2 * lag - 1);
            values.extend_from_slice(ts.row(lead_row(src)));
        }
    }
    let times = (1..=len).map(|i| i as f64).collect();
    Ok(TimeSeries::from_parts(e, values, times))
}

/// One series per ordered tuple of `k` distinct channels (optionally with
/// the timestamp channel first), tuples in lexicographic order.
pub fn augment_coordinate_projection(ts: &TimeSeries, k: usize, include_time: bool) -> Result<Vec<TimeSeries>> {
    let d = ts.dim();
    if k == 0 || k > 3 || k > d {
        return Err(Error::InvalidProjection { k, dim: d });
    }
    let mut tuples = Vec::new();
    let mut current = Vec::with_capacity(k);
    ordered_tuples(d, k, &mut current, &mut tuples);
    let e = k + usize::from(include_time);
    Ok(tuples
        .into_iter()
        .map(|tuple| {
            let mut values = Vec::with_capacity(ts.len() * e);
            for (row, &t) in ts.rows().zip(ts.timestamps()) {
                if include_time {
                    values.push(t);
                }
                values.extend(tuple.iter().map(|&c| row[c]));
            }
            TimeSeries::from_parts(e, values, ts.timestamps().to_vec())
        })
        .collect())
}

fn ordered_tuples(d: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if current.len() == k {
        out.push(current.clone());
        return;
    }
    for c in 0..d {
        if !current.contains(&c) {
            current.push(c);
            ordered_tuples(d, k, current, out);
            current.pop();
        }
    }
}

/// `p` affine maps `R^d → R^e` with entries i.i.d. `N(0, 1)/sqrt(d)` and zero
/// bias, drawn row-major, map after map, from `ChaCha8Rng::seed_from_u64`.
pub fn random_affine_maps(d: usize, e: usize, p: usize, seed: u64) -> Vec<AffineMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / libm::sqrt(d as f64);
    (0..p)
        .map(|_| AffineMap {
            matrix: (0..e * d)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    z * scale
                })
                .collect(),
            bias: vec![0.0; e],
        })
        .collect()
}

/// Applies each map to every observation; timestamps unchanged.
pub fn augment_affine_projection(ts: &TimeSeries, e: usize, maps: &[AffineMap]) -> Result<Vec<TimeSeries>> {
    let d = ts.dim();
    maps.iter()
        .map(|map| {
            if map.matrix.len() != e * d || map.bias.len() != e {
                return Err(Error::mismatch(
                    alloc::format!("{e}x{d} matrix and {e} bias"),
                    alloc::format!("{} matrix entries and {} bias", map.matrix.len(), map.bias.len()),
                ));
            }
            let mut values = Vec::with_capacity(ts.len() * e);
            for row in ts.rows() {
                for (a_row, b) in map.matrix.chunks_exact(d).zip(&map.bias) {
                    values.push(a_row.iter().zip(row).map(|(a, x)| a * x).sum::<f64>() + b);
                }
            }
            Ok(TimeSeries::from_parts(e, values, ts.timestamps().to_vec()))
        })
        .collect()
}

impl core::str::FromStr for AugmentationSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl From<AugmentStep> for AugmentationSpec {
    fn from(step: AugmentStep) -> Self {
        Self::new(vec![step]).expect("single step is always a valid chain")
    }
}
