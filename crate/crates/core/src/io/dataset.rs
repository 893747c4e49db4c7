use std::collections::HashSet;
use std::path::Path;

use crate::error::{Error, Result};

/// Named input columns plus a response vector, all of length `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    variable_names: Vec<String>,
    columns: Vec<Vec<f64>>,
    response_name: String,
    response: Vec<f64>,
}

impl Dataset {
    pub fn new(
        variable_names: Vec<String>,
        columns: Vec<Vec<f64>>,
        response_name: impl Into<String>,
        response: Vec<f64>,
    ) -> Result<Self> {
        let response_name = response_name.into();
        if variable_names.len() != columns.len() {
            return Err(Error::LengthMismatch {
                expected: variable_names.len(),
                actual: columns.len(),
            });
        }
        if columns.is_empty() {
            return Err(Error::InvalidInput("dataset has no input variables".into()));
        }
        let mut seen = HashSet::new();
        for name in variable_names.iter().chain(std::iter::once(&response_name)) {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateHeader(name.clone()));
            }
        }
        let n = response.len();
        if n < 3 {
            return Err(Error::InsufficientData { n, params: 3 });
        }
        for (j, c) in columns.iter().enumerate() {
            if c.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: c.len(),
                });
            }
            if let Some(row) = c.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { row, col: j });
            }
        }
        if let Some(row) = response.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row,
                col: columns.len(),
            });
        }
        Ok(Self {
            variable_names,
            columns,
            response_name,
            response,
        })
    }

    pub fn n_obs(&self) -> usize {
        self.response.len()
    }

    pub fn n_vars(&self) -> usize {
        self.columns.len()
    }

    pub fn variable_names(&self) -> &[String] {
        &self.variable_names
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn response_name(&self) -> &str {
        &self.response_name
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }
}

/// Decimal text with 17 significant digits, which round-trips any `f64`.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

/// Reads a headed CSV. Column order is preserved; the response column is
/// pulled out by name.
pub fn load_csv(path: impl AsRef<Path>, response_column: &str) -> Result<Dataset> {
    read_csv(csv_builder().from_path(path)?, response_column)
}

/// Same as [`load_csv`], for CSV text already in memory.
pub fn parse_csv(text: &str, response_column: &str) -> Result<Dataset> {
    read_csv(csv_builder().from_reader(text.as_bytes()), response_column)
}

fn csv_builder() -> csv::ReaderBuilder {
    let mut b = csv::ReaderBuilder::new();
    b.has_headers(true).trim(csv::Trim::All);
    b
}

fn read_csv<R: std::io::Read>(
    mut reader: csv::Reader<R>,
    response_column: &str,
) -> Result<Dataset> {
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let mut seen = HashSet::new();
    for h in &headers {
        if !seen.insert(h.as_str()) {
            return Err(Error::DuplicateHeader(h.clone()));
        }
    }
    let response_idx = headers
        .iter()
        .position(|h| h == response_column)
        .ok_or_else(|| Error::MissingResponse(response_column.to_owned()))?;

    let mut data: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        // Line 1 is the header.
        let line = i + 2;
        if record.len() != headers.len() {
            return Err(Error::Parse {
                line,
                column: String::new(),
                value: format!("{} fields, expected {}", record.len(), headers.len()),
            });
        }
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                line,
                column: headers[j].clone(),
                value: cell.to_owned(),
            })?;
            if !v.is_finite() {
                return Err(Error::NonFiniteCell {
                    line,
                    column: headers[j].clone(),
                });
            }
            data[j].push(v);
        }
    }

    let response = data.remove(response_idx);
    let mut names = headers;
    let response_name = names.remove(response_idx);
    Dataset::new(names, data, response_name, response)
}

/// Writes the inputs followed by the response, one row per observation.
pub fn write_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<&str> = dataset.variable_names.iter().map(String::as_str).collect();
    header.push(&dataset.response_name);
    w.write_record(&header)?;
    for i in 0..dataset.n_obs() {
        let row = dataset
            .columns
            .iter()
            .map(|c| c[i])
            .chain(std::iter::once(dataset.response[i]))
            .map(format_number);
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}
