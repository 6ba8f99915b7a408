//! Reader for the sktime / UEA `.ts` text format.
//!
//! ```text
//! # comment
//! @problemName BasicMotions
//! @timeStamps false
//! @univariate false
//! @dimension 2
//! @classLabel true standing walking
//! @data
//! 1,2,3:4,5,6:standing
//! ```
//!
//! Each record holds one `,`-separated value list per dimension, dimensions
//! separated by `:`, and the class label as the last `:` field when
//! `@classLabel true`. Missing values (`?`) and time-stamped records are
//! not supported and are rejected with the offending line number.

use std::io::BufRead;
use std::path::Path;

use sigpipe_core::TimeSeries;

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};

#[derive(Debug, Default)]
struct Header {
    problem_name: Option<String>,
    dimension: Option<usize>,
    univariate: Option<bool>,
    equal_length: Option<bool>,
    series_length: Option<usize>,
    class_labels: Option<Option<Vec<String>>>,
}

fn parse_bool(value: &str, line: usize, directive: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::parse(
            line,
            format!("@{directive} expects true or false, got {value:?}"),
        )),
    }
}

fn parse_count(value: &str, line: usize, directive: &str) -> Result<usize> {
    value
        .parse()
        .ok()
        .filter(|&v: &usize| v > 0)
        .ok_or_else(|| Error::parse(line, format!("@{directive} expects a positive integer, got {value:?}")))
}

impl Header {
    fn directive(&mut self, text: &str, line: usize) -> Result<()> {
        let mut parts = text[1..].split_whitespace();
        let name = parts.next().unwrap_or("").to_ascii_lowercase();
        let rest: Vec<&str> = parts.collect();
        let single = |what: &str| -> Result<&str> {
            match rest.as_slice() {
                [v] => Ok(v),
                _ => Err(Error::parse(line, format!("@{what} expects exactly one value"))),
            }
        };
        match name.as_str() {
            "problemname" => self.problem_name = Some(rest.join(" ")),
            "timestamps" => {
                if parse_bool(single("timeStamps")?, line, "timeStamps")? {
                    return Err(Error::parse(
                        line,
                        "@timeStamps true is not supported; use the CSV long format for time-stamped data",
                    ));
                }
            }
            "missing" => {
                parse_bool(single("missing")?, line, "missing")?;
            }
            "univariate" => self.univariate = Some(parse_bool(single("univariate")?, line, "univariate")?),
            "dimension" | "dimensions" => self.dimension = Some(parse_count(single("dimension")?, line, "dimension")?),
            "equallength" => self.equal_length = Some(parse_bool(single("equalLength")?, line, "equalLength")?),
            "serieslength" => self.series_length = Some(parse_count(single("seriesLength")?, line, "seriesLength")?),
            "classlabel" => {
                let (flag, labels) = rest
                    .split_first()
                    .ok_or_else(|| Error::parse(line, "@classLabel expects true or false"))?;
                if parse_bool(flag, line, "classLabel")? {
                    if labels.is_empty() {
                        return Err(Error::parse(line, "@classLabel true must list the class labels"));
                    }
                    self.class_labels = Some(Some(labels.iter().map(|s| s.to_string()).collect()));
                } else {
                    if !labels.is_empty() {
                        return Err(Error::parse(line, "@classLabel false takes no labels"));
                    }
                    self.class_labels = Some(None);
                }
            }
            "" => return Err(Error::parse(line, "empty directive")),
            other => return Err(Error::parse(line, format!("unknown directive @{other}"))),
        }
        Ok(())
    }

    fn expected_dimension(&self, line: usize) -> Result<Option<usize>> {
        match (self.univariate, self.dimension) {
            (Some(true), Some(d)) if d != 1 => Err(Error::parse(
                line,
                format!("@univariate true conflicts with @dimension {d}"),
            )),
            (Some(true), _) => Ok(Some(1)),
            (_, d) => Ok(d),
        }
    }
}

fn parse_record(
    text: &str,
    line: usize,
    header: &Header,
    dim: &mut Option<usize>,
) -> Result<(TimeSeries, Option<String>)> {
    let mut fields: Vec<&str> = text.split(':').map(str::trim).collect();
    let label = match &header.class_labels {
        Some(Some(known)) => {
            if fields.len() < 2 {
                return Err(Error::parse(line, "record has no class label field"));
            }
            let label = fields.pop().unwrap_or_default();
            if !known.iter().any(|k| k == label) {
                return Err(Error::parse(line, format!("unknown class label {label:?}")));
            }
            Some(label.to_string())
        }
        _ => None,
    };
    let d = fields.len();
    match *dim {
        Some(expected) if expected != d => {
            return Err(Error::parse(
                line,
                format!("record has {d} dimensions, expected {expected}"),
            ));
        }
        _ => *dim = Some(d),
    }
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(d);
    for (c, field) in fields.iter().enumerate() {
        let col = field
            .split(',')
            .map(|v| {
                let v = v.trim();
                if v == "?" || v.eq_ignore_ascii_case("nan") {
                    return Err(Error::parse(line, format!("missing value in dimension {}", c + 1)));
                }
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::parse(line, format!("invalid number {v:?} in dimension {}", c + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = columns.first() {
            if first.len() != col.len() {
                return Err(Error::parse(
                    line,
                    format!(
                        "dimensions of unequal length: dimension 1 has {} values, dimension {} has {}",
                        first.len(),
                        c + 1,
                        col.len()
                    ),
                ));
            }
        }
        columns.push(col);
    }
    let n = columns[0].len();
    if header.equal_length == Some(true) {
        if let Some(len) = header.series_length {
            if n != len {
                return Err(Error::parse(
                    line,
                    format!("series has {n} values, @seriesLength is {len}"),
                ));
            }
        }
    }
    let values = (0..n).flat_map(|i| columns.iter().map(move |c| c[i])).collect();
    let ts = TimeSeries::with_default_times(d, values).map_err(|e| Error::parse(line, e.to_string()))?;
    Ok((ts, label))
}

/// Parses `.ts` content from any buffered reader.
pub fn parse_ts<R: BufRead>(reader: R) -> Result<LabeledDataset> {
    let mut header = Header::default();
    let mut in_data = false;
    let mut dim = None;
    let mut samples = Vec::new();
    let mut labels = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        if !in_data {
            if !text.starts_with('@') {
                return Err(Error::parse(lineno, "data before @data"));
            }
            if text[1..].trim().eq_ignore_ascii_case("data") {
                in_data = true;
                dim = header.expected_dimension(lineno)?;
            } else {
                header.directive(text, lineno)?;
            }
            continue;
        }
        if text.starts_with('@') {
            return Err(Error::parse(lineno, "directive after @data"));
        }
        let (ts, label) = parse_record(text, lineno, &header, &mut dim)?;
        samples.push(ts);
        labels.push(label);
    }
    if !in_data {
        return Err(Error::parse(0, "missing @data section"));
    }
    let mut ds = LabeledDataset::new(samples, labels)?;
    ds.name = header.problem_name;
    Ok(ds)
}

pub fn parse_ts_str(text: &str) -> Result<LabeledDataset> {
    parse_ts(text.as_bytes())
}

pub fn parse_ts_file(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_ts(std::io::BufReader::new(file)).map_err(|e| e.in_file(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str =
        "@problemName toy\n@timeStamps false\n@univariate false\n@dimension 2\n@classLabel true classA classB\n@data\n";

    #[test]
    fn one_record() {
        let ds = parse_ts_str(&format!("{HEADER}1,2,3:4,5,6:classA\n")).unwrap();
        assert_eq!(ds.len(), 1);
        let s = &ds.samples[0];
        assert_eq!((s.dim(), s.len()), (2, 3));
        assert_eq!(s.values(), &[1.0, 4.0, 2.0, 5.0, 3.0, 6.0]);
        assert_eq!(ds.labels[0].as_deref(), Some("classA"));
        assert_eq!(ds.name.as_deref(), Some("toy"));
    }

    #[test]
    fn empty_data_section() {
        let ds = parse_ts_str(HEADER).unwrap();
        assert!(ds.is_empty());
    }

    #[test]
    fn unequal_dimensions_name_the_line() {
        let err = parse_ts_str(&format!("{HEADER}1,2,3:4,5,6:classA\n1,2:3,4,5:classB\n")).unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 8);
                assert!(message.contains("unequal length"), "{message}");
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn rejections() {
        let cases = [
            (format!("{HEADER}1,2:3,4:classC\n"), "unknown class label"),
            (format!("{HEADER}1,?:3,4:classA\n"), "missing value"),
            (format!("{HEADER}1,2:classA\n"), "dimensions"),
            ("@timeStamps true\n@data\n".to_string(), "not supported"),
            ("@frobnicate yes\n@data\n".to_string(), "unknown directive"),
            ("@classLabel false\n".to_string(), "missing @data"),
        ];
        for (text, needle) in cases {
            let err = parse_ts_str(&text).unwrap_err().to_string();
            assert!(err.contains(needle), "{err} !~ {needle}");
        }
    }

    #[test]
    fn unlabeled_univariate() {
        let ds = parse_ts_str("# comment\n@univariate true\n@classLabel false\n@data\n1,2,3\n4,5\n").unwrap();
        assert_eq!(ds.samples[1].len(), 2);
        assert_eq!(ds.labels, vec![None, None]);
    }
}
