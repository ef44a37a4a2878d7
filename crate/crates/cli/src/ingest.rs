//! Strict CSV reader: comma delimiter, mandatory header of distinct names,
//! finite numbers with `.` as decimal separator, no missing values.

use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use csv::{ReaderBuilder, StringRecord, Trim};
use leverage_core::{DataMatrix64, Matrix64};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub data: DataMatrix64,
    pub response: Option<Response>,
}

pub fn ingest_csv(path: &Path, response_column: Option<&str>) -> Result<Ingested, CliError> {
    let file = std::fs::File::open(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    ingest_reader(file, response_column)
}

pub fn ingest_reader<R: Read>(input: R, response_column: Option<&str>) -> Result<Ingested, CliError> {
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(Trim::All)
        .from_reader(input);
    let mut records = reader.records();

    let header = match records.next() {
        Some(rec) => rec.map_err(|e| csv_error(&e))?,
        None => {
            return Err(CliError::Parse {
                line: 1,
                col: 1,
                message: "empty input, expected a header".into(),
            })
        }
    };
    let names = header_names(&header)?;
    let response_at = match response_column {
        Some(name) => Some(
            names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| CliError::UnknownResponse(name.to_owned()))?,
        ),
        None => None,
    };

    let mut values = Vec::new();
    let mut response = Vec::new();
    let mut rows = 0;
    for rec in records {
        let rec = rec.map_err(|e| csv_error(&e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != names.len() {
            return Err(CliError::Parse {
                line,
                col: rec.len().min(names.len()) + 1,
                message: format!("expected {} fields, found {}", names.len(), rec.len()),
            });
        }
        for (k, field) in rec.iter().enumerate() {
            let v = parse_field(field, line, k + 1)?;
            if Some(k) == response_at {
                response.push(v);
            } else {
                values.push(v);
            }
        }
        rows += 1;
    }

    let regressors: Vec<String> = names
        .iter()
        .enumerate()
        .filter(|&(k, _)| Some(k) != response_at)
        .map(|(_, n)| n.clone())
        .collect();
    let matrix = Matrix64::from_row_major(rows, regressors.len(), values)?;
    Ok(Ingested {
        data: DataMatrix64::new(matrix, regressors)?,
        response: response_at.map(|k| Response {
            name: names[k].clone(),
            values: response,
        }),
    })
}

fn header_names(header: &StringRecord) -> Result<Vec<String>, CliError> {
    let mut seen = HashSet::new();
    header
        .iter()
        .enumerate()
        .map(|(k, name)| {
            if name.is_empty() {
                return Err(CliError::Parse {
                    line: 1,
                    col: k + 1,
                    message: "empty column name".into(),
                });
            }
            if !seen.insert(name) {
                return Err(CliError::DuplicateHeader(name.to_owned()));
            }
            Ok(name.to_owned())
        })
        .collect()
}

fn parse_field(field: &str, line: u64, col: usize) -> Result<f64, CliError> {
    if field.is_empty() {
        return Err(CliError::MissingValue { line, col });
    }
    let bad = |message: String| CliError::Parse { line, col, message };
    // Rust's parser also accepts "inf", "NaN" and friends; only plain
    // decimal notation is allowed here
    if !field
        .bytes()
        .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'-' | b'+' | b'e' | b'E'))
    {
        return Err(bad(format!("not a number: {field:?}")));
    }
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(bad(format!("value out of range: {field:?}"))),
        Err(_) => Err(bad(format!("not a number: {field:?}"))),
    }
}

fn csv_error(e: &csv::Error) -> CliError {
    let line = e.position().map_or(0, |p| p.line());
    CliError::Parse {
        line,
        col: 1,
        message: e.to_string(),
    }
}
