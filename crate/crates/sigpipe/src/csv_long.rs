//! Long-format CSV: one observation per row, grouped by sample.
//!
//! ```text
//! sample_id,timestamp,c1,c2,label
//! s1,0.0,1.0,2.0,walk
//! s1,0.5,2.0,2.5,walk
//! ```
//!
//! The last column is treated as the label when its header is `label`. Every
//! sample's rows must be contiguous and its timestamps strictly increasing;
//! timestamps may be irregular and sample lengths may differ.

use std::io::{Read, Write};
use std::path::Path;

use sigpipe_core::TimeSeries;

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};

struct Pending {
    id: String,
    label: Option<String>,
    values: Vec<f64>,
    times: Vec<f64>,
    first_line: usize,
}

pub fn parse_csv_long_reader<R: Read>(reader: R) -> Result<LabeledDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let has_label = headers
        .iter()
        .next_back()
        .is_some_and(|h| h.eq_ignore_ascii_case("label"));
    let d = headers.len().saturating_sub(2 + usize::from(has_label));
    if d == 0 {
        return Err(Error::parse(
            1,
            "header must be sample_id,timestamp,<channel>..[,label] with at least one channel",
        ));
    }

    let mut ds = LabeledDataset::default();
    let mut current: Option<Pending> = None;
    let finish = |p: Pending, ds: &mut LabeledDataset| -> Result<()> {
        if ds.ids.contains(&p.id) {
            return Err(Error::parse(
                p.first_line,
                format!("rows of sample {:?} are not contiguous", p.id),
            ));
        }
        let ts = TimeSeries::new(d, p.values, p.times).map_err(|e| Error::parse(p.first_line, e.to_string()))?;
        ds.ids.push(p.id);
        ds.samples.push(ts);
        ds.labels.push(p.label);
        Ok(())
    };

    for (idx, record) in rdr.records().enumerate() {
        let line = idx + 2;
        let record = record?;
        if record.len() != headers.len() {
            return Err(Error::parse(
                line,
                format!("expected {} fields, found {}", headers.len(), record.len()),
            ));
        }
        let id = &record[0];
        let number = |col: usize| -> Result<f64> {
            let raw = &record[col];
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(line, format!("invalid number {raw:?} in column {:?}", &headers[col])))
        };
        let t = number(1)?;
        let label = has_label.then(|| record[record.len() - 1].to_string());

        if current.as_ref().is_some_and(|p| p.id != id) {
            finish(current.take().expect("checked"), &mut ds)?;
        }
        let p = current.get_or_insert_with(|| Pending {
            id: id.to_string(),
            label: label.clone(),
            values: Vec::new(),
            times: Vec::new(),
            first_line: line,
        });
        if let Some(&prev) = p.times.last() {
            if t <= prev {
                return Err(Error::parse(
                    line,
                    format!("timestamp {t} of sample {id:?} does not increase (previous {prev})"),
                ));
            }
        }
        if p.label != label {
            return Err(Error::parse(line, format!("sample {id:?} changes label")));
        }
        p.times.push(t);
        for c in 0..d {
            p.values.push(number(2 + c)?);
        }
    }
    if let Some(p) = current {
        finish(p, &mut ds)?;
    }
    ds.check()?;
    Ok(ds)
}

pub fn parse_csv_long_str(text: &str) -> Result<LabeledDataset> {
    parse_csv_long_reader(text.as_bytes())
}

pub fn parse_csv_long(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_csv_long_reader(std::io::BufReader::new(file)).map_err(|e| e.in_file(path))
}

/// Writes `dataset` in long format. Floats use shortest round-trip
/// formatting so that reading the file back reproduces every value exactly.
pub fn write_csv_long<W: Write>(dataset: &LabeledDataset, writer: W) -> Result<()> {
    let d = dataset.dim().unwrap_or(1);
    let has_label = dataset.labels.iter().any(Option::is_some);
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["sample_id".to_string(), "timestamp".to_string()];
    header.extend((1..=d).map(|c| format!("c{c}")));
    if has_label {
        header.push("label".into());
    }
    wtr.write_record(&header)?;
    let mut row = Vec::with_capacity(header.len());
    for ((id, ts), label) in dataset.ids.iter().zip(&dataset.samples).zip(&dataset.labels) {
        for (t, values) in ts.timestamps().iter().zip(ts.rows()) {
            row.clear();
            row.push(id.clone());
            row.push(format!("{t:?}"));
            row.extend(values.iter().map(|v| format!("{v:?}")));
            if has_label {
                row.push(label.clone().unwrap_or_default());
            }
            wtr.write_record(&row)?;
        }
    }
    wtr.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}
