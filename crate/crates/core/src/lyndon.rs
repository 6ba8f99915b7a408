//! Lyndon words and the reduced logsignature coordinates they index.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::tensor::{word_index, TruncatedTensor};

/// Lyndon words over `{0..d}` of length `1..=N`, ordered by length and then
/// lexicographically, each with its flat index inside its tensor level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LyndonBasis {
    dim: usize,
    depth: usize,
    words: Vec<Vec<usize>>,
    indices: Vec<usize>,
}

impl LyndonBasis {
    pub fn new(dim: usize, depth: usize) -> Self {
        assert!(dim >= 1 && depth >= 1, "Lyndon basis needs dim >= 1 and depth >= 1");
        let mut words = duval_words(dim, depth);
        words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let indices = words.iter().map(|w| word_index(dim, w)).collect();
        Self {
            dim,
            depth,
            words,
            indices,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Words with 0-based letters.
    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    /// Number of basis words of length `k`.
    pub fn count_at(&self, k: usize) -> usize {
        self.words.iter().filter(|w| w.len() == k).count()
    }

    /// Reads a Lie element at the Lyndon-word coordinates, level by level.
    pub fn project(&self, lie: &TruncatedTensor) -> Result<Vec<f64>> {
        if lie.dim() != self.dim || lie.depth() != self.depth {
            return Err(Error::mismatch(
                alloc::format!("(d={}, N={})", self.dim, self.depth),
                alloc::format!("(d={}, N={})", lie.dim(), lie.depth()),
            ));
        }
        Ok(self
            .words
            .iter()
            .zip(&self.indices)
            .map(|(w, &i)| lie.level(w.len())[i])
            .collect())
    }
}

/// Duval's generation of all Lyndon words of length at most `max_len`, in
/// lexicographic order.
fn duval_words(dim: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut w: Vec<usize> = vec![0];
    while !w.is_empty() {
        out.push(w.clone());
        let m = w.len();
        while w.len() < max_len {
            let c = w[w.len() - m];
            w.push(c);
        }
        while let Some(&last) = w.last() {
            if last == dim - 1 {
                w.pop();
            } else {
                break;
            }
        }
        if let Some(last) = w.last_mut() {
            *last += 1;
        }
    }
    out
}

fn mobius(mut n: usize) -> i64 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Witt's formula: dimension of the degree-`k` part of the free Lie algebra
/// on `dim` generators.
pub fn witt(dim: usize, k: usize) -> usize {
    assert!(k >= 1);
    let sum: i128 = (1..=k)
        .filter(|m| k.is_multiple_of(*m))
        .map(|m| mobius(m) as i128 * (dim as i128).pow((k / m) as u32))
        .sum();
    (sum / k as i128) as usize
}

/// Total logsignature width `sum_{k=1..N} W(d, k)`.
pub fn logsignature_len(dim: usize, depth: usize) -> usize {
    (1..=depth).map(|k| witt(dim, k)).sum()
}
