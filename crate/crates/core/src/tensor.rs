//! Dense arithmetic in the tensor algebra over `R^d`, truncated at depth `N`.
//!
//! A [`TruncatedTensor`] stores every level in one flat buffer. Level `k`
//! occupies `d^k` consecutive coefficients, and the word `(i_1, .., i_k)`
//! (letters `0..d`) lives at offset `sum_m i_m * d^(k-m)` inside that block,
//! i.e. row-major order.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Element of `T^N(R^d)`, one dense coefficient block per level `0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedTensor {
    dim: usize,
    depth: usize,
    data: Vec<f64>,
}

/// Number of coefficients in levels `0..=depth`.
pub(crate) fn total_len(dim: usize, depth: usize) -> usize {
    let mut len = 0;
    let mut block = 1;
    for _ in 0..=depth {
        len += block;
        block *= dim;
    }
    len
}

/// Offset of level `k` inside the flat buffer.
#[inline]
fn level_offset(dim: usize, k: usize) -> usize {
    total_len(dim, k) - dim.pow(k as u32)
}

impl TruncatedTensor {
    pub fn zeros(dim: usize, depth: usize) -> Self {
        assert!(dim >= 1 && depth >= 1, "tensor needs dim >= 1 and depth >= 1");
        Self {
            dim,
            depth,
            data: vec![0.0; total_len(dim, depth)],
        }
    }

    /// The unit `(1, 0, .., 0)`.
    pub fn identity(dim: usize, depth: usize) -> Self {
        let mut t = Self::zeros(dim, depth);
        t.data[0] = 1.0;
        t
    }

    /// Builds a tensor from explicit level blocks `levels[0..=N]`.
    pub fn from_levels(dim: usize, levels: &[Vec<f64>]) -> Result<Self> {
        if dim == 0 || levels.len() < 2 {
            return Err(Error::InvalidInput(
                "tensor needs dim >= 1 and at least levels 0 and 1".into(),
            ));
        }
        let depth = levels.len() - 1;
        let mut data = Vec::with_capacity(total_len(dim, depth));
        for (k, block) in levels.iter().enumerate() {
            let want = dim.pow(k as u32);
            if block.len() != want {
                return Err(Error::mismatch(
                    alloc::format!("level {k} of length {want}"),
                    block.len(),
                ));
            }
            data.extend_from_slice(block);
        }
        Ok(Self { dim, depth, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn scalar(&self) -> f64 {
        self.data[0]
    }

    pub fn level(&self, k: usize) -> &[f64] {
        let start = level_offset(self.dim, k);
        &self.data[start..start + self.dim.pow(k as u32)]
    }

    pub fn level_mut(&mut self, k: usize) -> &mut [f64] {
        let start = level_offset(self.dim, k);
        let len = self.dim.pow(k as u32);
        &mut self.data[start..start + len]
    }

    /// All coefficients, level 0 first.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Coefficients of levels `1..=N`, the signature feature layout.
    pub fn without_scalar(&self) -> &[f64] {
        &self.data[1..]
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.depth != other.depth {
            return Err(Error::mismatch(
                alloc::format!("(d={}, N={})", self.dim, self.depth),
                alloc::format!("(d={}, N={})", other.dim, other.depth),
            ));
        }
        Ok(())
    }

    /// Truncated tensor product `self ⊗ other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut out = Self::zeros(self.dim, self.depth);
        for k in 0..=self.depth {
            let dst_off = level_offset(self.dim, k);
            for p in 0..=k {
                let q = k - p;
                let a = self.level(p);
                let b = other.level(q);
                let dst = &mut out.data[dst_off..dst_off + a.len() * b.len()];
                outer_add(dst, a, b);
            }
        }
        Ok(out)
    }

    /// `exp(v) = sum_k v^{⊗k} / k!`, the signature of the straight segment
    /// with increment `v`.
    pub fn exp(increment: &[f64], depth: usize) -> Result<Self> {
        let dim = increment.len();
        if dim == 0 || depth == 0 {
            return Err(Error::InvalidInput(
                "exp needs a non-empty increment and depth >= 1".into(),
            ));
        }
        let mut out = Self::identity(dim, depth);
        out.level_mut(1).copy_from_slice(increment);
        for k in 2..=depth {
            let prev_off = level_offset(dim, k - 1);
            let prev_len = dim.pow(k as u32 - 1);
            let cur_off = prev_off + prev_len;
            let scale = 1.0 / k as f64;
            let (head, tail) = out.data.split_at_mut(cur_off);
            let prev = &head[prev_off..];
            for (i, &p) in prev.iter().enumerate() {
                let row = &mut tail[i * dim..(i + 1) * dim];
                for (r, &v) in row.iter_mut().zip(increment) {
                    *r = p * v * scale;
                }
            }
        }
        Ok(out)
    }

    /// Logarithm by the truncated series `sum_m (-1)^(m+1) (t - 1)^m / m`.
    pub fn log(&self) -> Result<Self> {
        if self.data[0] != 1.0 {
            return Err(Error::NotGroupLike(self.data[0]));
        }
        let mut x = self.clone();
        x.data[0] = 0.0;
        let mut out = x.clone();
        let mut power = x.clone();
        for m in 2..=self.depth {
            power = power.mul(&x)?;
            let coeff = if m % 2 == 0 { -1.0 } else { 1.0 } / m as f64;
            for (o, p) in out.data.iter_mut().zip(&power.data) {
                *o += coeff * p;
            }
        }
        Ok(out)
    }

    /// Exponential series of a tensor with zero scalar part, the inverse of
    /// [`TruncatedTensor::log`] on Lie elements.
    pub fn exp_series(&self) -> Result<Self> {
        if self.data[0] != 0.0 {
            return Err(Error::InvalidInput("exp_series needs a zero scalar part".into()));
        }
        let mut out = Self::identity(self.dim, self.depth);
        let mut power = Self::identity(self.dim, self.depth);
        let mut factorial = 1.0;
        for m in 1..=self.depth {
            power = power.mul(self)?;
            factorial *= m as f64;
            for (o, p) in out.data.iter_mut().zip(&power.data) {
                *o += p / factorial;
            }
        }
        Ok(out)
    }

    /// In-place `self ← self ⊗ exp(increment)`.
    ///
    /// Horner scheme per level: level k gains
    /// `(((S_0 Δ/k + S_1) Δ/(k-1) + S_2) .. + S_{k-1}) Δ/1`, so no segment
    /// tensor is materialised. Levels are updated top-down, reading only
    /// lower levels that are still untouched. `scratch` is grown to two
    /// top-level blocks on first use and reused across calls.
    pub(crate) fn mul_exp_in_place(&mut self, increment: &[f64], scratch: &mut Vec<f64>) {
        let dim = self.dim;
        debug_assert_eq!(increment.len(), dim);
        let top = dim.pow(self.depth as u32);
        if scratch.len() < 2 * top {
            scratch.resize(2 * top, 0.0);
        }
        for k in (1..=self.depth).rev() {
            let (cur, next) = scratch.split_at_mut(top);
            // cur holds a level-m tensor; start with S_0 Δ / k.
            let s0 = self.data[0];
            let inv = 1.0 / k as f64;
            for (c, &v) in cur[..dim].iter_mut().zip(increment) {
                *c = s0 * v * inv;
            }
            let mut cur_len = dim;
            let mut cur_ref: &mut [f64] = cur;
            let mut next_ref: &mut [f64] = next;
            for m in 1..k {
                // cur += S_m, then cur ⊗ Δ / (k - m)
                let lvl = self.level(m);
                for (c, &s) in cur_ref[..cur_len].iter_mut().zip(lvl) {
                    *c += s;
                }
                let inv = 1.0 / (k - m) as f64;
                for i in 0..cur_len {
                    let c = cur_ref[i] * inv;
                    let row = &mut next_ref[i * dim..(i + 1) * dim];
                    for (r, &v) in row.iter_mut().zip(increment) {
                        *r = c * v;
                    }
                }
                cur_len *= dim;
                core::mem::swap(&mut cur_ref, &mut next_ref);
            }
            let dst = self.level_mut(k);
            for (d, &c) in dst.iter_mut().zip(&cur_ref[..cur_len]) {
                *d += c;
            }
        }
    }
}

/// `dst[i * b.len() + j] += a[i] * b[j]`
#[inline]
fn outer_add(dst: &mut [f64], a: &[f64], b: &[f64]) {
    let bl = b.len();
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        let row = &mut dst[i * bl..(i + 1) * bl];
        for (r, &bj) in row.iter_mut().zip(b) {
            *r += ai * bj;
        }
    }
}

/// Flat index of a 0-based word inside its level block.
pub fn word_index(dim: usize, word: &[usize]) -> usize {
    word.iter().fold(0, |acc, &letter| acc * dim + letter)
}
