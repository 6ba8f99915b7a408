//! Brute-force signature by direct numerical integration.
//!
//! Evaluates the iterated integrals through the recursion
//! `S_() = 1`, `S_(w,i)(t) = ∫ S_w(u) dX^i_u`, stepping along each linear
//! segment with composite trapezoid steps. It shares no code with the
//! Chen-identity evaluation in [`crate::signature`] and exists to check it.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::signature::{check_path, SignatureFeatures};

pub fn signature_oracle(ts: &TimeSeries, depth: usize, subdivisions: usize) -> Result<SignatureFeatures> {
    check_path(ts, depth)?;
    if subdivisions == 0 {
        return Err(Error::InvalidInput("subdivisions must be at least 1".into()));
    }
    let dim = ts.dim();
    // levels[k] holds the d^k iterated integrals of words of length k.
    let mut levels: Vec<Vec<f64>> = (0..=depth).map(|k| vec![0.0; dim.pow(k as u32)]).collect();
    levels[0][0] = 1.0;
    let mut before = levels.clone();
    let mut dx = vec![0.0; dim];
    let h = 1.0 / subdivisions as f64;

    for j in 1..ts.len() {
        let (a, b) = (ts.row(j - 1), ts.row(j));
        for i in 0..dim {
            dx[i] = (b[i] - a[i]) * h;
        }
        for _ in 0..subdivisions {
            for (dst, src) in before.iter_mut().zip(&levels) {
                dst.copy_from_slice(src);
            }
            for k in 1..=depth {
                let len_prev = dim.pow(k as u32 - 1);
                for w in 0..len_prev {
                    let avg = 0.5 * (before[k - 1][w] + levels[k - 1][w]);
                    for i in 0..dim {
                        levels[k][w * dim + i] += avg * dx[i];
                    }
                }
            }
        }
    }

    Ok(SignatureFeatures {
        dim,
        depth,
        values: levels.into_iter().skip(1).flatten().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_one_is_exact() {
        let ts = TimeSeries::from_rows(&[[0.5, -1.0], [2.0, 3.0]]).unwrap();
        for sub in [1, 3, 10] {
            let s = signature_oracle(&ts, 1, sub).unwrap();
            assert!((s.values[0] - 1.5).abs() < 1e-15);
            assert!((s.values[1] - 4.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_subdivisions_rejected() {
        let ts = TimeSeries::from_rows(&[[0.0], [1.0]]).unwrap();
        assert!(signature_oracle(&ts, 2, 0).is_err());
    }
}
