use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A multivariate time series: `n` observations in `R^d` with strictly
/// increasing timestamps. Values are stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    dim: usize,
    values: Vec<f64>,
    timestamps: Vec<f64>,
}

impl TimeSeries {
    /// Validating constructor. `values` is row-major with `dim` columns.
    pub fn new(dim: usize, values: Vec<f64>, timestamps: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("series dimension must be positive".into()));
        }
        if values.is_empty() {
            return Err(Error::TooShort { needed: 1, found: 0 });
        }
        if !values.len().is_multiple_of(dim) {
            return Err(Error::mismatch(
                alloc::format!("a multiple of {dim} values"),
                values.len(),
            ));
        }
        let n = values.len() / dim;
        if timestamps.len() != n {
            return Err(Error::mismatch(alloc::format!("{n} timestamps"), timestamps.len()));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(alloc::format!(
                "non-finite value at row {}, channel {}",
                pos / dim,
                pos % dim
            )));
        }
        if timestamps.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidInput("non-finite timestamp".into()));
        }
        if let Some(i) = timestamps.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(alloc::format!(
                "timestamps not strictly increasing at row {}",
                i + 1
            )));
        }
        Ok(Self {
            dim,
            values,
            timestamps,
        })
    }

    /// Series with default timestamps `1, 2, .., n`.
    pub fn with_default_times(dim: usize, values: Vec<f64>) -> Result<Self> {
        let n = values.len().checked_div(dim).unwrap_or(0);
        let times = (1..=n).map(|i| i as f64).collect();
        Self::new(dim, values, times)
    }

    /// Convenience constructor from rows with default timestamps.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(rows.len() * dim);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::mismatch(
                    alloc::format!("{dim} channels"),
                    alloc::format!("{} at row {i}", r.len()),
                ));
            }
            values.extend_from_slice(r);
        }
        Self::with_default_times(dim, values)
    }

    /// Rebuilds a series without re-validating; callers guarantee the
    /// invariants (used by augmentations and windows on valid input).
    pub(crate) fn from_parts(dim: usize, values: Vec<f64>, timestamps: Vec<f64>) -> Self {
        debug_assert!(dim > 0 && values.len() == dim * timestamps.len());
        debug_assert!(timestamps.windows(2).all(|w| w[0] < w[1]));
        Self {
            dim,
            values,
            timestamps,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.timestamps
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> core::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.dim)
    }

    /// Contiguous sub-series of rows `start..end`, timestamps kept.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        Self::from_parts(
            self.dim,
            self.values[start * self.dim..end * self.dim].to_vec(),
            self.timestamps[start..end].to_vec(),
        )
    }

    /// Same timestamps, values transformed elementwise.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_parts(
            self.dim,
            self.values.iter().map(|&v| f(v)).collect(),
            self.timestamps.clone(),
        )
    }

    /// Replaces the timestamps, keeping the values.
    pub fn with_timestamps(&self, timestamps: Vec<f64>) -> Result<Self> {
        Self::new(self.dim, self.values.clone(), timestamps)
    }
}
