//! CSV observation files and versioned JSON reports.
//!
//! Observation files carry a header `x1,...,xp,y1,...,yq`; `p` and `q` are
//! read from it.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::dea::ObservationSet;
use crate::error::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("bad header: {0}")]
    Header(String),
    #[error("row {row}, column {column}: cannot parse {value:?} as a number")]
    Value { row: usize, column: String, value: String },
    #[error(transparent)]
    Sample(#[from] Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Write(#[from] std::io::Error),
}

/// `(p, q)` from a header `x1..xp,y1..yq`.
fn parse_header(header: &csv::StringRecord) -> Result<(usize, usize), IoError> {
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    let p = names.iter().take_while(|s| s.starts_with('x')).count();
    let q = names.len() - p;
    let expected: Vec<String> =
        (1..=p).map(|i| format!("x{i}")).chain((1..=q).map(|j| format!("y{j}"))).collect();
    if p == 0 || q == 0 || names != expected {
        return Err(IoError::Header(format!("expected x1..xp,y1..yq, found {:?}", names.join(","))));
    }
    Ok((p, q))
}

pub fn parse_observations<R: Read>(reader: R) -> Result<ObservationSet, IoError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers()?.clone();
    let (p, q) = parse_header(&header)?;
    let (mut inputs, mut outputs) = (Vec::new(), Vec::new());
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        for (k, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| IoError::Value {
                row: row + 1,
                column: header[k].to_string(),
                value: field.to_string(),
            })?;
            if k < p {
                inputs.push(v);
            } else {
                outputs.push(v);
            }
        }
    }
    if inputs.is_empty() {
        return Err(IoError::Sample(Error::InvalidSample("file has no data rows".into())));
    }
    Ok(ObservationSet::from_flat(p, q, inputs, outputs)?)
}

pub fn read_observations(path: &Path) -> Result<ObservationSet, IoError> {
    let file = File::open(path).map_err(|source| IoError::File { path: path.display().to_string(), source })?;
    parse_observations(file)
}

pub fn write_observations<W: Write>(sample: &ObservationSet, writer: W) -> Result<(), IoError> {
    let mut wtr = csv::Writer::from_writer(writer);
    let header: Vec<String> =
        (1..=sample.p()).map(|i| format!("x{i}")).chain((1..=sample.q()).map(|j| format!("y{j}"))).collect();
    wtr.write_record(&header)?;
    for i in 0..sample.n() {
        let row: Vec<String> = sample.input(i).iter().chain(sample.output(i)).map(|v| v.to_string()).collect();
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

/// Pretty JSON with `schema_version` and `command` ahead of the body's
/// fields, newline-terminated.
pub fn report_json<T: Serialize>(command: &str, body: &T) -> Result<String, IoError> {
    let mut s = serde_json::to_string_pretty(&Report { schema_version: SCHEMA_VERSION, command, body })?;
    s.push('\n');
    Ok(s)
}

/// Write rows of any serialisable record type as CSV with a header.
pub fn write_table<W: Write, T: Serialize>(rows: &[T], writer: W) -> Result<(), IoError> {
    let mut wtr = csv::Writer::from_writer(writer);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}
