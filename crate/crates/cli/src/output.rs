//! Result tables and their CSV / JSON encodings.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Number, Value};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("refusing to write an empty result table")]
    EmptyTable,
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Rows keyed by a sweep-axis value, with named numeric columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub axis: String,
    pub columns: Vec<String>,
    pub rows: Vec<(f64, Vec<f64>)>,
}

impl ResultTable {
    pub fn new(axis: impl Into<String>, columns: Vec<String>) -> Self {
        Self {
            axis: axis.into(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, value: f64, cells: Vec<f64>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push((value, cells));
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|(_, cells)| cells[i]).collect())
    }
}

/// Nine significant digits; plain notation for moderate magnitudes.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exponent) = sci.split_once('e').expect("scientific format");
    let exponent: i32 = exponent.parse().expect("exponent");
    if !(-4..9).contains(&exponent) {
        return sci;
    }
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let body = if exponent >= 0 {
        let split = exponent as usize + 1;
        format!("{}.{}", &digits[..split], &digits[split..])
    } else {
        format!("0.{}{}", "0".repeat((-exponent - 1) as usize), digits)
    };
    let body = body.trim_end_matches('.');
    if negative {
        format!("-{body}")
    } else {
        body.to_string()
    }
}

fn json_number(v: f64) -> Value {
    Number::from_f64(v).map_or_else(|| Value::String(format_number(v)), Value::Number)
}

pub fn write_results<W: Write>(table: &ResultTable, format: Format, out: W) -> Result<(), OutputError> {
    if table.rows.is_empty() {
        return Err(OutputError::EmptyTable);
    }
    match format {
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(out);
            let mut header = vec![table.axis.as_str()];
            header.extend(table.columns.iter().map(String::as_str));
            writer.write_record(&header)?;
            for (value, cells) in &table.rows {
                let mut record = vec![format_number(*value)];
                record.extend(cells.iter().map(|&c| format_number(c)));
                writer.write_record(&record)?;
            }
            writer.flush().map_err(|source| OutputError::Write {
                path: "<output>".into(),
                source,
            })?;
        }
        Format::Json => {
            let records: Vec<Value> = table
                .rows
                .iter()
                .map(|(value, cells)| {
                    let mut record = Map::new();
                    record.insert(table.axis.clone(), json_number(*value));
                    for (name, &c) in table.columns.iter().zip(cells) {
                        record.insert(name.clone(), json_number(c));
                    }
                    Value::Object(record)
                })
                .collect();
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &records)?;
            writeln!(out).map_err(|source| OutputError::Write {
                path: "<output>".into(),
                source,
            })?;
        }
    }
    Ok(())
}

/// Writes `table` to `path`, or to stdout when `path` is `None`.
pub fn emit_results(table: &ResultTable, format: Format, path: Option<&Path>) -> Result<(), OutputError> {
    match path {
        Some(path) => {
            let display = path.display().to_string();
            let file = std::fs::File::create(path).map_err(|source| OutputError::Write { path: display, source })?;
            write_results(table, format, std::io::BufWriter::new(file))
        }
        None => write_results(table, format, std::io::stdout().lock()),
    }
}
