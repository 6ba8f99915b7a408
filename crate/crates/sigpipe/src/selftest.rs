//! Algebraic laws checked on seeded synthetic data, as run by
//! `sigpipe selftest`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sigpipe_core::augment::augment_lead_lag;
use sigpipe_core::lyndon::{logsignature_len, witt, LyndonBasis};
use sigpipe_core::oracle::signature_oracle;
use sigpipe_core::rescale::{pre_scale_factor, rescale_post, rescale_pre, unscale_post};
use sigpipe_core::signature::{logsignature, signature, signature_len, signature_tensor};
use sigpipe_core::{Result, TimeSeries, Transform, WindowSpec};

#[derive(Debug, Clone, Copy, Default)]
pub struct SelftestOptions {
    /// Fewer cases and no oracle comparison.
    pub quick: bool,
    /// Corrupts one shuffle-law comparison so that the run must fail.
    pub inject_fault: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawResult {
    pub name: &'static str,
    pub passed: usize,
    pub total: usize,
}

impl LawResult {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

impl fmt::Display for LawResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.ok() { "ok" } else { "FAILED" };
        write!(f, "{:<22} {:>4}/{:<4} {status}", self.name, self.passed, self.total)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelftestReport {
    pub laws: Vec<LawResult>,
}

impl SelftestReport {
    pub fn ok(&self) -> bool {
        self.laws.iter().all(LawResult::ok)
    }
}

fn series(rng: &mut ChaCha8Rng, n: usize, d: usize) -> TimeSeries {
    let values = (0..n * d).map(|_| rng.random_range(-1.0..1.0)).collect();
    TimeSeries::with_default_times(d, values).expect("finite values")
}

fn rel_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * scale)
}

fn tally(name: &'static str, total: usize, mut case: impl FnMut(usize) -> Result<bool>) -> LawResult {
    let passed = (0..total).filter(|&i| case(i).unwrap_or(false)).count();
    LawResult { name, passed, total }
}

pub fn run(options: SelftestOptions) -> SelftestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let scale = |full: usize, quick: usize| if options.quick { quick } else { full };
    let mut laws = Vec::new();

    if !options.quick {
        laws.push(tally("oracle", 40, |_| {
            let (n, d, depth) = (
                rng.random_range(2..=8),
                rng.random_range(1..=3),
                rng.random_range(1..=3),
            );
            let ts = series(&mut rng, n, d);
            let fast = signature(&ts, depth)?;
            let slow = signature_oracle(&ts, depth, 1000)?;
            Ok(rel_close(&fast.values, &slow.values, 1e-5))
        }));
    }

    laws.push(tally("chen", scale(50, 10), |_| {
        let (d, depth) = (rng.random_range(1..=3), rng.random_range(1..=4));
        let (n1, n2) = (rng.random_range(2..=6), rng.random_range(2..=6));
        let whole = series(&mut rng, n1 + n2 - 1, d);
        let left = whole.slice(0, n1);
        let right = whole.slice(n1 - 1, n1 + n2 - 1);
        let joined = signature_tensor(&left, depth)?.mul(&signature_tensor(&right, depth)?)?;
        Ok(rel_close(
            joined.as_slice(),
            signature_tensor(&whole, depth)?.as_slice(),
            1e-10,
        ))
    }));

    laws.push(tally("shuffle", scale(50, 10), |case| {
        let d = rng.random_range(1..=3);
        let n = rng.random_range(2..=12);
        let ts = series(&mut rng, n, d);
        let mut s = signature(&ts, 2)?.values;
        if options.inject_fault && case == 0 {
            s[d] += 1e-3;
        }
        let ok = (0..d).all(|i| {
            (0..d).all(|j| {
                let lhs = s[d + i * d + j] + s[d + j * d + i];
                let rhs = s[i] * s[j];
                (lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0)
            })
        });
        Ok(ok)
    }));

    laws.push(tally("invariance", scale(30, 5), |_| {
        let d = rng.random_range(1..=3);
        let n = rng.random_range(3..=8);
        let ts = series(&mut rng, n, d);
        let base = signature(&ts, 3)?.values;
        // insert the midpoint of every segment
        let mut refined = Vec::new();
        for i in 0..n {
            if i > 0 {
                refined.extend(ts.row(i - 1).iter().zip(ts.row(i)).map(|(a, b)| 0.5 * (a + b)));
            }
            refined.extend_from_slice(ts.row(i));
        }
        let refined = TimeSeries::with_default_times(d, refined)?;
        let mut t = 0.0;
        let stamps = (0..n)
            .map(|_| {
                t += rng.random_range(0.1..3.0);
                t
            })
            .collect();
        let shift: Vec<f64> = (0..d).map(|_| rng.random_range(-5.0..5.0)).collect();
        let moved = TimeSeries::with_default_times(
            d,
            ts.values().iter().enumerate().map(|(k, v)| v + shift[k % d]).collect(),
        )?;
        Ok(rel_close(&signature(&refined, 3)?.values, &base, 1e-10)
            && signature(&ts.with_timestamps(stamps)?, 3)?.values == base
            && rel_close(&signature(&moved, 3)?.values, &base, 1e-10))
    }));

    laws.push(tally("levy_area", 1, |_| {
        let path = TimeSeries::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])?;
        Ok((logsignature(&path, 2)?.values[2] - 0.5).abs() <= 1e-12)
    }));

    laws.push(tally("lead_lag_variation", scale(30, 5), |_| {
        let n = rng.random_range(2..=12);
        let ts = series(&mut rng, n, 1);
        let ll = augment_lead_lag(&ts, &[1])?;
        let s = signature(&ll, 2)?.values;
        let area = 0.5 * (s[3] - s[4]);
        let qv: f64 = ts.values().windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
        Ok((area.abs() - 0.5 * qv).abs() <= 1e-8)
    }));

    let (max_d, max_n) = if options.quick { (3, 3) } else { (5, 6) };
    laws.push(tally("dimensions", max_d * max_n + 5, |i| {
        if i >= max_d * max_n {
            let q = i - max_d * max_n + 1;
            return Ok(WindowSpec::Dyadic { depth: q }.count(64)? == (1 << q) - 1);
        }
        let (d, depth) = (i / max_n + 1, i % max_n + 1);
        let sig: usize = (1..=depth).map(|k| d.pow(k as u32)).sum();
        let log: usize = (1..=depth).map(|k| witt(d, k)).sum();
        Ok(signature_len(d, depth) == sig
            && logsignature_len(d, depth) == log
            && LyndonBasis::new(d, depth).len() == log)
    }));

    laws.push(tally("rescaling", scale(20, 5), |_| {
        let d = rng.random_range(1..=3);
        let depth = rng.random_range(1..=4);
        let n = rng.random_range(2..=8);
        let ts = series(&mut rng, n, d);
        let plain = signature(&ts, depth)?.values;
        let pre = signature(&rescale_pre(&ts, depth)?, depth)?.values;
        let alpha = pre_scale_factor(depth);
        let mut off = 0;
        let mut ok = true;
        let mut factorial = 1.0;
        let post = rescale_post(&plain, d, depth, Transform::Signature)?;
        for k in 1..=depth {
            factorial *= k as f64;
            let len = d.pow(k as u32);
            let want: Vec<f64> = plain[off..off + len].iter().map(|v| v * alpha.powi(k as i32)).collect();
            ok &= rel_close(&pre[off..off + len], &want, 1e-10);
            ok &= plain[off..off + len]
                .iter()
                .zip(&post[off..off + len])
                .all(|(p, q)| *q == p * factorial);
            off += len;
        }
        ok &= rel_close(&unscale_post(&post, d, depth, Transform::Signature)?, &plain, 1e-15);
        Ok(ok)
    }));

    SelftestReport { laws }
}
