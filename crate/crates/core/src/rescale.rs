//! Pre- and post-signature rescaling. The depth-`k` term of a signature is
//! `O(1/k!)`; both modes bring it back towards `O(1)`.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::lyndon::LyndonBasis;
use crate::series::TimeSeries;
use crate::signature::{transform_len, Transform};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RescaleSpec {
    #[default]
    None,
    /// Scale the path by `(N!)^(1/N)` before the transform.
    Pre,
    /// Scale the depth-`k` features by `k!` after the transform.
    Post,
}

impl RescaleSpec {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(RescaleSpec::None),
            "pre" => Ok(RescaleSpec::Pre),
            "post" => Ok(RescaleSpec::Post),
            other => Err(Error::InvalidSpec(alloc::format!(
                "unknown rescaling {other:?}, expected none, pre or post"
            ))),
        }
    }
}

impl fmt::Display for RescaleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RescaleSpec::None => "none",
            RescaleSpec::Pre => "pre",
            RescaleSpec::Post => "post",
        })
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `α = (N!)^(1/N)`
pub fn pre_scale_factor(depth: usize) -> f64 {
    libm::pow(factorial(depth), 1.0 / depth as f64)
}

/// Multiplies every value (timestamps untouched) by `(N!)^(1/N)`.
pub fn rescale_pre(ts: &TimeSeries, depth: usize) -> Result<TimeSeries> {
    if depth == 0 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    if depth == 1 {
        return Ok(ts.clone());
    }
    let alpha = pre_scale_factor(depth);
    Ok(ts.map_values(|v| v * alpha))
}

/// Word length of each feature position, in output order.
fn feature_levels(dim: usize, depth: usize, transform: Transform) -> Vec<usize> {
    match transform {
        Transform::Signature => (1..=depth)
            .flat_map(|k| core::iter::repeat_n(k, dim.pow(k as u32)))
            .collect(),
        Transform::LogSignature => LyndonBasis::new(dim, depth).words().iter().map(Vec::len).collect(),
    }
}

fn scale_by_level(features: &[f64], dim: usize, depth: usize, transform: Transform, inverse: bool) -> Result<Vec<f64>> {
    let want = transform_len(transform, dim, depth);
    if features.len() != want {
        return Err(Error::mismatch(want, features.len()));
    }
    let factorials: Vec<f64> = (0..=depth).map(factorial).collect();
    Ok(features
        .iter()
        .zip(feature_levels(dim, depth, transform))
        .map(|(&v, k)| if inverse { v / factorials[k] } else { v * factorials[k] })
        .collect())
}

/// Multiplies the depth-`k` block by `k!` (Lyndon coordinates by the
/// factorial of their word length).
pub fn rescale_post(features: &[f64], dim: usize, depth: usize, transform: Transform) -> Result<Vec<f64>> {
    scale_by_level(features, dim, depth, transform, false)
}

/// Inverse of [`rescale_post`].
pub fn unscale_post(features: &[f64], dim: usize, depth: usize, transform: Transform) -> Result<Vec<f64>> {
    scale_by_level(features, dim, depth, transform, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pre_factor() {
        assert_eq!(pre_scale_factor(1), 1.0);
        assert!((pre_scale_factor(3) - 1.817_120_592_832_139_7).abs() < 1e-15);
        let ts = TimeSeries::from_rows(&[[1.0], [2.0]]).unwrap();
        assert_eq!(rescale_pre(&ts, 1).unwrap(), ts);
    }

    #[test]
    fn post_scaling() {
        assert_eq!(
            rescale_post(&[2.0, 2.0, 4.0 / 3.0], 1, 3, Transform::Signature).unwrap(),
            vec![2.0, 4.0, 8.0]
        );
        let f = [0.3, -0.1, 0.25];
        assert_eq!(rescale_post(&f, 3, 1, Transform::Signature).unwrap(), f.to_vec());
        let twice = rescale_post(
            &rescale_post(&[1.0, 1.0, 1.0], 1, 3, Transform::Signature).unwrap(),
            1,
            3,
            Transform::Signature,
        )
        .unwrap();
        assert_eq!(twice, vec![1.0, 4.0, 36.0]);
    }

    #[test]
    fn post_scaling_logsignature_uses_word_length() {
        let f = [1.0; 5];
        assert_eq!(
            rescale_post(&f, 2, 3, Transform::LogSignature).unwrap(),
            vec![1.0, 1.0, 2.0, 6.0, 6.0]
        );
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            rescale_post(&[1.0; 4], 2, 2, Transform::Signature),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn parse() {
        assert_eq!(RescaleSpec::parse("Post").unwrap(), RescaleSpec::Post);
        assert!(RescaleSpec::parse("both").is_err());
    }
}
