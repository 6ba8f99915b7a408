use std::fmt;

use rayon::prelude::*;
use sigpipe_core::TimeSeries;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Split {
    Train,
    Test,
    #[default]
    Unsplit,
}

impl Split {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            "unsplit" | "none" => Ok(Split::Unsplit),
            other => Err(Error::Config(format!(
                "unknown split {other:?}, expected train, test or unsplit"
            ))),
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Test => "test",
            Split::Unsplit => "unsplit",
        })
    }
}

/// Samples with optional class labels. All samples share one channel count;
/// lengths may differ.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabeledDataset {
    pub name: Option<String>,
    pub ids: Vec<String>,
    pub samples: Vec<TimeSeries>,
    pub labels: Vec<Option<String>>,
    pub split: Split,
    /// Statistics this dataset has been normalized with, if any.
    pub normalization: Option<NormalizationStats>,
}

impl LabeledDataset {
    pub fn new(samples: Vec<TimeSeries>, labels: Vec<Option<String>>) -> Result<Self> {
        let ids = (0..samples.len()).map(|i| i.to_string()).collect();
        let ds = Self {
            ids,
            samples,
            labels,
            ..Self::default()
        };
        ds.check()?;
        Ok(ds)
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.samples.len() != self.labels.len() || self.samples.len() != self.ids.len() {
            return Err(Error::Parse {
                line: 0,
                message: format!(
                    "{} samples but {} labels and {} ids",
                    self.samples.len(),
                    self.labels.len(),
                    self.ids.len()
                ),
            });
        }
        if let Some(first) = self.samples.first() {
            if let Some((i, s)) = self.samples.iter().enumerate().find(|(_, s)| s.dim() != first.dim()) {
                return Err(Error::parse(
                    0,
                    format!("sample {i} has {} channels, expected {}", s.dim(), first.dim()),
                ));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Channel count, `None` for an empty dataset.
    pub fn dim(&self) -> Option<usize> {
        self.samples.first().map(TimeSeries::dim)
    }

    pub fn with_split(mut self, split: Split) -> Self {
        self.split = split;
        self
    }
}

/// Per-channel mean and population standard deviation, pooled over every
/// observation of every sample.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    /// Channels whose spread is numerically zero; these are only centred.
    pub constant: Vec<bool>,
}

/// Fits statistics on a training (or unsplit) dataset. Test data is refused.
pub fn fit_normalizer(dataset: &LabeledDataset) -> Result<NormalizationStats> {
    if dataset.split == Split::Test {
        return Err(Error::Normalization(
            "normalization statistics cannot be fitted on a test split".into(),
        ));
    }
    let d = dataset
        .dim()
        .ok_or_else(|| Error::Normalization("cannot fit normalization on an empty dataset".into()))?;
    let count: usize = dataset.samples.iter().map(TimeSeries::len).sum();
    let mut mean = vec![0.0; d];
    for s in &dataset.samples {
        for row in s.rows() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
    }
    mean.iter_mut().for_each(|m| *m /= count as f64);
    let mut var = vec![0.0; d];
    for s in &dataset.samples {
        for row in s.rows() {
            for ((acc, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *acc += (v - m) * (v - m);
            }
        }
    }
    let std: Vec<f64> = var.iter().map(|v| (v / count as f64).sqrt()).collect();
    let constant = std
        .iter()
        .zip(&mean)
        .map(|(s, m): (&f64, &f64)| *s <= 1e-12 * m.abs().max(1.0))
        .collect();
    Ok(NormalizationStats { mean, std, constant })
}

impl NormalizationStats {
    pub fn apply_to(&self, ts: &TimeSeries) -> Result<TimeSeries> {
        let d = self.mean.len();
        if ts.dim() != d {
            return Err(Error::Normalization(format!(
                "series has {} channels, statistics were fitted on {d}",
                ts.dim()
            )));
        }
        let values = ts
            .values()
            .chunks_exact(d)
            .flat_map(|row| {
                row.iter().enumerate().map(|(c, v)| {
                    let centred = v - self.mean[c];
                    if self.constant[c] {
                        centred
                    } else {
                        centred / self.std[c]
                    }
                })
            })
            .collect();
        Ok(TimeSeries::new(d, values, ts.timestamps().to_vec())?)
    }

    /// Normalizes every sample; the dataset records the statistics used.
    pub fn apply(&self, dataset: &LabeledDataset) -> Result<LabeledDataset> {
        let samples = dataset
            .samples
            .par_iter()
            .map(|s| self.apply_to(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(LabeledDataset {
            samples,
            normalization: Some(self.clone()),
            ..dataset.clone()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uni(values: &[f64]) -> TimeSeries {
        TimeSeries::with_default_times(1, values.to_vec()).unwrap()
    }

    #[test]
    fn pooled_population_std() {
        let ds = LabeledDataset::new(vec![uni(&[1.0]), uni(&[3.0])], vec![None, None]).unwrap();
        let stats = fit_normalizer(&ds).unwrap();
        assert_eq!(stats.mean, vec![2.0]);
        assert_eq!(stats.std, vec![1.0]);
        let out = stats.apply(&ds).unwrap();
        assert_eq!(out.samples[0].values(), &[-1.0]);
        assert_eq!(out.samples[1].values(), &[1.0]);
        assert!(out.normalization.is_some());
    }

    #[test]
    fn constant_channel_is_centred() {
        let ts = TimeSeries::with_default_times(2, vec![0.1, 1.0, 0.1, 2.0, 0.1, 3.0]).unwrap();
        let ds = LabeledDataset::new(vec![ts], vec![None]).unwrap();
        let stats = fit_normalizer(&ds).unwrap();
        assert_eq!(stats.constant, vec![true, false]);
        let out = stats.apply(&ds).unwrap();
        assert!(out.samples[0].rows().all(|r| r[0].abs() < 1e-15 && r[1].is_finite()));
    }

    #[test]
    fn already_normalized_is_near_identity() {
        let ds = LabeledDataset::new(vec![uni(&[-1.0, 1.0, -1.0, 1.0])], vec![None]).unwrap();
        let stats = fit_normalizer(&ds).unwrap();
        assert_eq!((stats.mean[0], stats.std[0]), (0.0, 1.0));
        assert_eq!(stats.apply(&ds).unwrap().samples, ds.samples);
    }

    #[test]
    fn refuses_empty_and_test() {
        assert!(fit_normalizer(&LabeledDataset::default()).is_err());
        let ds = LabeledDataset::new(vec![uni(&[1.0, 2.0])], vec![None])
            .unwrap()
            .with_split(Split::Test);
        assert!(matches!(fit_normalizer(&ds), Err(Error::Normalization(_))));
    }

    #[test]
    fn mixed_dimensions_rejected() {
        let two = TimeSeries::from_rows(&[[1.0, 2.0]]).unwrap();
        assert!(LabeledDataset::new(vec![uni(&[1.0]), two], vec![None, None]).is_err());
    }
}
