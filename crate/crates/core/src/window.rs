//! Window families `W: S(R^e) → S(R^e)^w`. Lengths and steps count
//! observations, not time.

use alloc::vec::Vec;
use core::fmt;

use crate::augment::{parse_uint, split_call};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowSpec {
    #[default]
    Global,
    /// `x_{1:ℓ}, x_{l+1:l+ℓ}, x_{2l+1:2l+ℓ}, ..` while the end fits.
    Sliding { length: usize, step: usize },
    /// `x_{1:ℓ}, x_{1:l+ℓ}, x_{1:2l+ℓ}, ..` while the end fits.
    Expanding { length: usize, step: usize },
    /// Exactly `count` sliding windows with `ℓ = l = floor(n / count)`.
    SlidingCount { count: usize },
    /// Exactly `count` expanding windows with `ℓ = l = floor(n / count)`.
    ExpandingCount { count: usize },
    /// Levels `1..=q`; level `i` splits the series into `2^(i-1)` disjoint
    /// contiguous blocks, `2^q - 1` windows in total.
    Dyadic { depth: usize },
}

impl WindowSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidSpec(msg.into()));
        match *self {
            WindowSpec::Global => Ok(()),
            WindowSpec::Sliding { length, step } | WindowSpec::Expanding { length, step } => {
                if length < 2 {
                    bad("window length must be at least 2")
                } else if step < 1 {
                    bad("window step must be at least 1")
                } else {
                    Ok(())
                }
            }
            WindowSpec::SlidingCount { count } | WindowSpec::ExpandingCount { count } => {
                if count < 1 {
                    bad("window count must be at least 1")
                } else {
                    Ok(())
                }
            }
            WindowSpec::Dyadic { depth } => {
                if depth < 1 {
                    bad("dyadic depth must be at least 1")
                } else if depth > 30 {
                    bad("dyadic depth must be at most 30")
                } else {
                    Ok(())
                }
            }
        }
    }

    /// `(length, step)` for the sliding/expanding families at series length `n`.
    fn resolve(&self, n: usize) -> Result<Option<(usize, usize, Option<usize>)>> {
        let (length, step, cap) = match *self {
            WindowSpec::Sliding { length, step } | WindowSpec::Expanding { length, step } => (length, step, None),
            WindowSpec::SlidingCount { count } | WindowSpec::ExpandingCount { count } => {
                let l = n / count;
                if l < 2 {
                    return Err(Error::EmptyWindow { length: 2 * count, n });
                }
                (l, l, Some(count))
            }
            _ => return Ok(None),
        };
        if length > n {
            return Err(Error::EmptyWindow { length, n });
        }
        Ok(Some((length, step, cap)))
    }

    /// Number of windows produced for a series of length `n`, without
    /// building them.
    pub fn count(&self, n: usize) -> Result<usize> {
        self.validate()?;
        if n < 2 {
            return Err(Error::TooShort { needed: 2, found: n });
        }
        match *self {
            WindowSpec::Global => Ok(1),
            WindowSpec::Dyadic { depth } => Ok((1usize << depth) - 1),
            _ => {
                let (length, step, cap) = self.resolve(n)?.expect("sliding family");
                let full = (n - length) / step + 1;
                Ok(cap.map_or(full, |c| full.min(c)))
            }
        }
    }

    /// Row ranges `start..end` of each window.
    pub fn ranges(&self, n: usize) -> Result<Vec<(usize, usize)>> {
        let count = self.count(n)?;
        let expanding = matches!(self, WindowSpec::Expanding { .. } | WindowSpec::ExpandingCount { .. });
        Ok(match *self {
            WindowSpec::Global => alloc::vec![(0, n)],
            WindowSpec::Dyadic { depth } => {
                let mut out = Vec::with_capacity(count);
                for level in 0..depth {
                    let blocks = 1usize << level;
                    let bound = |j: usize| (2 * j * n + blocks) / (2 * blocks);
                    out.extend((0..blocks).map(|j| (bound(j), bound(j + 1))));
                }
                out
            }
            _ => {
                let (length, step, _) = self.resolve(n)?.expect("sliding family");
                (0..count)
                    .map(|j| {
                        let end = j * step + length;
                        if expanding {
                            (0, end)
                        } else {
                            (j * step, end)
                        }
                    })
                    .collect()
            }
        })
    }

    /// Materialises the windows. Windows with fewer than two observations
    /// (possible only for deep dyadic levels on short series) become a
    /// repeated single point, so their signature is zero.
    pub fn apply(&self, ts: &TimeSeries) -> Result<Vec<TimeSeries>> {
        Ok(self
            .ranges(ts.len())?
            .into_iter()
            .map(|(start, end)| window_of(ts, start, end))
            .collect())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let (name, args) = split_call(text)?;
        let two = |what: &str| -> Result<(usize, usize)> {
            match args.as_slice() {
                [a, b] => Ok((parse_uint(a, what)?, parse_uint(b, what)?)),
                _ => Err(Error::InvalidSpec(alloc::format!("{name} expects (length,step)"))),
            }
        };
        let one = |what: &str| -> Result<usize> {
            match args.as_slice() {
                [a] => parse_uint(a, what),
                _ => Err(Error::InvalidSpec(alloc::format!("{name} expects one argument"))),
            }
        };
        let spec = match name.as_str() {
            "global" if args.is_empty() => WindowSpec::Global,
            "sliding" => {
                let (length, step) = two("sliding window")?;
                WindowSpec::Sliding { length, step }
            }
            "expanding" => {
                let (length, step) = two("expanding window")?;
                WindowSpec::Expanding { length, step }
            }
            "sliding_count" => WindowSpec::SlidingCount {
                count: one("window count")?,
            },
            "expanding_count" => WindowSpec::ExpandingCount {
                count: one("window count")?,
            },
            "dyadic" => WindowSpec::Dyadic {
                depth: one("dyadic depth")?,
            },
            _ => return Err(Error::InvalidSpec(alloc::format!("unknown window {text:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn window_of(ts: &TimeSeries, start: usize, end: usize) -> TimeSeries {
    if end - start >= 2 {
        return ts.slice(start, end);
    }
    // empty blocks (more blocks than observations) reuse the nearest point
    let at = start.min(ts.len() - 1);
    let t = ts.timestamps()[at];
    let row = ts.row(at);
    let mut values = row.to_vec();
    values.extend_from_slice(row);
    // the repeated point needs a strictly later stamp; it never reaches the signature
    let next = ts.timestamps().get(at + 1).copied().unwrap_or(t + 1.0);
    TimeSeries::from_parts(ts.dim(), values, alloc::vec![t, (t + next) / 2.0])
}

impl fmt::Display for WindowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowSpec::Global => f.write_str("global"),
            WindowSpec::Sliding { length, step } => write!(f, "sliding({length},{step})"),
            WindowSpec::Expanding { length, step } => write!(f, "expanding({length},{step})"),
            WindowSpec::SlidingCount { count } => write!(f, "sliding_count({count})"),
            WindowSpec::ExpandingCount { count } => write!(f, "expanding_count({count})"),
            WindowSpec::Dyadic { depth } => write!(f, "dyadic({depth})"),
        }
    }
}

impl core::str::FromStr for WindowSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}
