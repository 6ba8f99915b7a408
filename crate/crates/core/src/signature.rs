//! Depth-`N` signature and logsignature of the piecewise-linear path through
//! the observations of a [`TimeSeries`].
//!
//! The signature is evaluated with Chen's identity: the path is folded
//! left-to-right one linear segment at a time into a single running tensor,
//! which is `O(n d^N)` time and `O(d^N)` memory. Timestamps play no part
//! here; only the order of the observations matters.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lyndon::{logsignature_len, LyndonBasis};
use crate::series::TimeSeries;
use crate::tensor::TruncatedTensor;

/// Which transform produces the per-window features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Transform {
    #[default]
    Signature,
    LogSignature,
}

/// Levels `1..=N` of the signature, level-blocked and row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureFeatures {
    pub dim: usize,
    pub depth: usize,
    pub values: Vec<f64>,
}

/// Logsignature read at the Lyndon-word coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LogSignatureFeatures {
    pub dim: usize,
    pub depth: usize,
    pub values: Vec<f64>,
}

/// `sum_{k=1..N} d^k`
pub fn signature_len(dim: usize, depth: usize) -> usize {
    (1..=depth).fold(0usize, |acc, k| acc.saturating_add(dim.saturating_pow(k as u32)))
}

/// Feature width of `transform` at `(dim, depth)`.
pub fn transform_len(transform: Transform, dim: usize, depth: usize) -> usize {
    match transform {
        Transform::Signature => signature_len(dim, depth),
        Transform::LogSignature => logsignature_len(dim, depth),
    }
}

pub(crate) fn check_path(ts: &TimeSeries, depth: usize) -> Result<()> {
    if depth == 0 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    if ts.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            found: ts.len(),
        });
    }
    Ok(())
}

/// Full group-like signature tensor, scalar term included.
pub fn signature_tensor(ts: &TimeSeries, depth: usize) -> Result<TruncatedTensor> {
    check_path(ts, depth)?;
    let dim = ts.dim();
    let mut sig = TruncatedTensor::identity(dim, depth);
    let mut scratch = Vec::new();
    let mut delta = alloc::vec![0.0; dim];
    let mut rows = ts.rows();
    let mut prev = rows.next().expect("length checked");
    for row in rows {
        for ((d, &b), &a) in delta.iter_mut().zip(row).zip(prev) {
            *d = b - a;
        }
        sig.mul_exp_in_place(&delta, &mut scratch);
        prev = row;
    }
    Ok(sig)
}

pub fn signature(ts: &TimeSeries, depth: usize) -> Result<SignatureFeatures> {
    let sig = signature_tensor(ts, depth)?;
    Ok(SignatureFeatures {
        dim: ts.dim(),
        depth,
        values: sig.without_scalar().to_vec(),
    })
}

pub fn logsignature(ts: &TimeSeries, depth: usize) -> Result<LogSignatureFeatures> {
    check_path(ts, depth)?;
    let basis = LyndonBasis::new(ts.dim(), depth);
    logsignature_with_basis(ts, &basis)
}

/// Logsignature with a prebuilt basis, for repeated use at the same shape.
pub fn logsignature_with_basis(ts: &TimeSeries, basis: &LyndonBasis) -> Result<LogSignatureFeatures> {
    if basis.dim() != ts.dim() {
        return Err(Error::mismatch(format!("{} channels", basis.dim()), ts.dim()));
    }
    let sig = signature_tensor(ts, basis.depth())?;
    let values = basis.project(&sig.log()?)?;
    Ok(LogSignatureFeatures {
        dim: ts.dim(),
        depth: basis.depth(),
        values,
    })
}

/// Applies `transform` and returns the flat feature vector.
pub fn transform(ts: &TimeSeries, transform: Transform, depth: usize, basis: Option<&LyndonBasis>) -> Result<Vec<f64>> {
    match transform {
        Transform::Signature => Ok(signature(ts, depth)?.values),
        Transform::LogSignature => match basis {
            Some(b) if b.depth() == depth => Ok(logsignature_with_basis(ts, b)?.values),
            _ => Ok(logsignature(ts, depth)?.values),
        },
    }
}

fn join_word(word: &[usize]) -> String {
    let mut s = String::new();
    for (i, letter) in word.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&format!("{}", letter + 1));
    }
    s
}

/// Column names aligned with the feature vectors: `sig(i_1,..,i_k)` or
/// `logsig[i_1,..,i_k]`, with 1-based channel letters.
pub fn feature_names(dim: usize, depth: usize, transform: Transform) -> Vec<String> {
    match transform {
        Transform::Signature => {
            let mut names = Vec::with_capacity(signature_len(dim, depth));
            let mut word = Vec::new();
            for k in 1..=depth {
                word.clear();
                word.resize(k, 0);
                for _ in 0..dim.pow(k as u32) {
                    names.push(format!("sig({})", join_word(&word)));
                    // odometer increment
                    for pos in (0..k).rev() {
                        word[pos] += 1;
                        if word[pos] < dim {
                            break;
                        }
                        word[pos] = 0;
                    }
                }
            }
            names
        }
        Transform::LogSignature => LyndonBasis::new(dim, depth)
            .words()
            .iter()
            .map(|w| format!("logsig[{}]", join_word(w)))
            .collect(),
    }
}
