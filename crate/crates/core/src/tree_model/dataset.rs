use std::path::Path;

use crate::error::{Error, Result};

/// Row-major table of real-valued features with an optional target.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: Vec<f64>,
    n_rows: usize,
    n_cols: usize,
    y: Option<Vec<f64>>,
    columns: Vec<String>,
}

impl Dataset {
    pub fn new(rows: Vec<Vec<f64>>, y: Option<Vec<f64>>, columns: Vec<String>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = columns.len();
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::InvalidData("dataset needs at least one row and one column".into()));
        }
        let mut x = Vec::with_capacity(n_rows * n_cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::Shape {
                    expected: n_cols,
                    actual: row.len(),
                    row: Some(i),
                });
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidData(format!(
                    "non-finite value in row {i}, column '{}'",
                    columns[j]
                )));
            }
            x.extend(row);
        }
        if let Some(y) = &y {
            if y.len() != n_rows {
                return Err(Error::InvalidData(format!(
                    "target has {} entries for {n_rows} rows",
                    y.len()
                )));
            }
            if y.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidData("non-finite target value".into()));
            }
        }
        Ok(Dataset {
            x,
            n_rows,
            n_cols,
            y,
            columns,
        })
    }

    /// Reads a comma-delimited file with a header row. When `target` is
    /// given, that column becomes `y` and is removed from the features.
    pub fn from_csv(path: impl AsRef<Path>, target: Option<&str>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::csv(path, e))?;
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| Error::csv(path, e))?
            .iter()
            .map(str::to_owned)
            .collect();
        let target_idx = match target {
            Some(name) => Some(header.iter().position(|h| h == name).ok_or_else(|| {
                Error::InvalidData(format!("target column '{name}' not found in {}", path.display()))
            })?),
            None => None,
        };

        let mut rows = Vec::new();
        let mut y = target_idx.map(|_| Vec::new());
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::csv(path, e))?;
            let mut row = Vec::with_capacity(header.len());
            for (j, field) in record.iter().enumerate() {
                let v: f64 = field.parse().map_err(|_| {
                    Error::InvalidData(format!(
                        "row {i}, column '{}': cannot parse '{field}' as a number",
                        header[j]
                    ))
                })?;
                if Some(j) == target_idx {
                    y.as_mut().expect("target buffer").push(v);
                } else {
                    row.push(v);
                }
            }
            rows.push(row);
        }
        let columns = header
            .into_iter()
            .enumerate()
            .filter(|(j, _)| Some(*j) != target_idx)
            .map(|(_, h)| h)
            .collect();
        Dataset::new(rows, y, columns)
    }

    pub fn to_csv(&self, path: impl AsRef<Path>, target_name: &str) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
        let mut header = self.columns.clone();
        if self.y.is_some() {
            header.push(target_name.to_owned());
        }
        w.write_record(&header).map_err(|e| Error::csv(path, e))?;
        for i in 0..self.n_rows {
            let mut rec: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            if let Some(y) = &self.y {
                rec.push(y[i].to_string());
            }
            w.write_record(&rec).map_err(|e| Error::csv(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.x.chunks_exact(self.n_cols)
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.x[i * self.n_cols + j]
    }

    pub fn target(&self) -> Option<&[f64]> {
        self.y.as_deref()
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    /// Rows `idx` as a new dataset (target carried along).
    pub fn subset(&self, idx: &[usize]) -> Dataset {
        let mut x = Vec::with_capacity(idx.len() * self.n_cols);
        for &i in idx {
            x.extend_from_slice(self.row(i));
        }
        Dataset {
            x,
            n_rows: idx.len(),
            n_cols: self.n_cols,
            y: self.y.as_ref().map(|y| idx.iter().map(|&i| y[i]).collect()),
            columns: self.columns.clone(),
        }
    }
}
