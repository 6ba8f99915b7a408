//! Feature matrices and their CSV / ndjson serialization.
//!
//! CSV columns are `sample`, then `window` for the per-window layout, then
//! one column per feature, then `label` when any sample is labelled. Floats
//! are written in shortest round-trip form, so re-reading a file recovers
//! every value bit for bit.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use serde_json::json;
use sigpipe_core::{FeatureSet, Layout};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Ndjson,
}

impl OutputFormat {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "ndjson" | "jsonl" => Ok(OutputFormat::Ndjson),
            other => Err(Error::Config(format!(
                "unknown output format {other:?}, expected csv or ndjson"
            ))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Ndjson => "ndjson",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub sample: String,
    /// 1-based window index for the per-window layout.
    pub window: Option<usize>,
    pub values: Vec<f64>,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureTable {
    pub columns: Vec<String>,
    pub rows: Vec<FeatureRow>,
}

impl FeatureTable {
    /// Lays out one [`FeatureSet`] per sample. Every set must have the same
    /// shape.
    pub fn from_sets(ids: &[String], sets: &[FeatureSet], labels: &[Option<String>], layout: Layout) -> Result<Self> {
        let Some(first) = sets.first() else {
            return Ok(Self::default());
        };
        if let Some((i, s)) = sets.iter().enumerate().find(|(_, s)| s.shape != first.shape) {
            return Err(Error::Config(format!(
                "sample {} yields {} features ({} windows), sample {} yields {} ({} windows); \
                 choose a window family that does not depend on series length",
                ids[0],
                first.width(),
                first.shape.windows,
                ids[i],
                s.width(),
                s.shape.windows
            )));
        }
        let columns = match layout {
            Layout::Flat => first.column_names(),
            Layout::PerWindowSequence => first.sequence_column_names(),
        };
        let mut rows = Vec::new();
        for ((id, set), label) in ids.iter().zip(sets).zip(labels) {
            match layout {
                Layout::Flat => rows.push(FeatureRow {
                    sample: id.clone(),
                    window: None,
                    values: set.flat(),
                    label: label.clone(),
                }),
                Layout::PerWindowSequence => {
                    rows.extend(set.sequence().into_iter().enumerate().map(|(j, values)| FeatureRow {
                        sample: id.clone(),
                        window: Some(j + 1),
                        values,
                        label: label.clone(),
                    }))
                }
            }
        }
        Ok(Self { columns, rows })
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    fn has_windows(&self) -> bool {
        self.rows.iter().any(|r| r.window.is_some())
    }

    fn has_labels(&self) -> bool {
        self.rows.iter().any(|r| r.label.is_some())
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let windows = self.has_windows();
        let labels = self.has_labels();
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header = vec!["sample".to_string()];
        if windows {
            header.push("window".into());
        }
        header.extend(self.columns.iter().cloned());
        if labels {
            header.push("label".into());
        }
        wtr.write_record(&header)?;
        let mut record = Vec::with_capacity(header.len());
        for row in &self.rows {
            record.clear();
            record.push(row.sample.clone());
            if windows {
                record.push(row.window.map(|w| w.to_string()).unwrap_or_default());
            }
            record.extend(row.values.iter().map(|v| format!("{v:?}")));
            if labels {
                record.push(row.label.clone().unwrap_or_default());
            }
            wtr.write_record(&record)?;
        }
        wtr.flush().map_err(|e| Error::io("<feature output>", e))?;
        Ok(())
    }

    /// One JSON object per sample. Per-window rows of a sample are grouped
    /// into a nested `features` array, one inner array per window.
    pub fn write_ndjson<W: Write>(&self, mut writer: W) -> Result<()> {
        let io = |e| Error::io("<feature output>", e);
        let mut i = 0;
        while i < self.rows.len() {
            let row = &self.rows[i];
            let object = if row.window.is_some() {
                let end = self.rows[i..]
                    .iter()
                    .position(|r| r.sample != row.sample)
                    .map_or(self.rows.len(), |k| i + k);
                let features: Vec<&Vec<f64>> = self.rows[i..end].iter().map(|r| &r.values).collect();
                i = end;
                json!({ "sample": row.sample, "features": features, "label": row.label })
            } else {
                i += 1;
                json!({ "sample": row.sample, "features": row.values, "label": row.label })
            };
            serde_json::to_writer(&mut writer, &object)?;
            writer.write_all(b"\n").map_err(io)?;
        }
        writer.flush().map_err(io)
    }

    pub fn write<W: Write>(&self, writer: W, format: OutputFormat) -> Result<()> {
        match format {
            OutputFormat::Csv => self.write_csv(writer),
            OutputFormat::Ndjson => self.write_ndjson(writer),
        }
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.get(0) != Some("sample") {
            return Err(Error::parse(1, "feature file must start with a sample column"));
        }
        let windows = headers.get(1) == Some("window");
        let labels = headers.len() > 1 && headers.iter().next_back() == Some("label");
        let first = 1 + usize::from(windows);
        let last = headers.len() - usize::from(labels);
        if last < first {
            return Err(Error::parse(1, "feature file has no feature columns"));
        }
        let columns = headers
            .iter()
            .skip(first)
            .take(last - first)
            .map(String::from)
            .collect();
        let mut rows = Vec::new();
        for (idx, record) in rdr.records().enumerate() {
            let line = idx + 2;
            let record = record?;
            let window = if windows {
                Some(
                    record[1]
                        .parse()
                        .map_err(|_| Error::parse(line, format!("invalid window index {:?}", &record[1])))?,
                )
            } else {
                None
            };
            let values = (first..last)
                .map(|c| {
                    record[c]
                        .parse::<f64>()
                        .map_err(|_| Error::parse(line, format!("invalid number {:?}", &record[c])))
                })
                .collect::<Result<Vec<_>>>()?;
            let label = labels.then(|| record[last].to_string()).filter(|l| !l.is_empty());
            rows.push(FeatureRow {
                sample: record[0].to_string(),
                window,
                values,
                label,
            });
        }
        Ok(Self { columns, rows })
    }
}

/// Writes `table` to `path`, creating or truncating the file.
pub fn write_features(table: &FeatureTable, path: impl AsRef<Path>, format: OutputFormat) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    table
        .write(std::io::BufWriter::new(file), format)
        .map_err(|e| e.in_file(path))
}

pub fn read_features_csv(path: impl AsRef<Path>) -> Result<FeatureTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    FeatureTable::read_csv(std::io::BufReader::new(file)).map_err(|e| e.in_file(path))
}
