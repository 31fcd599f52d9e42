use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// S x K attribution matrix with one base value per observation.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapMatrix {
    values: DMatrix<f64>,
    base_values: Vec<f64>,
    names: Vec<String>,
}

impl ShapMatrix {
    pub fn new(values: DMatrix<f64>, base_values: Vec<f64>, names: Vec<String>) -> Result<Self> {
        if base_values.len() != values.nrows() {
            return Err(Error::InvalidData(format!(
                "{} base values for {} observations",
                base_values.len(),
                values.nrows()
            )));
        }
        if names.len() != values.ncols() {
            return Err(Error::InvalidData(format!(
                "{} column names for {} columns",
                names.len(),
                values.ncols()
            )));
        }
        Ok(ShapMatrix {
            values,
            base_values,
            names,
        })
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn base_values(&self) -> &[f64] {
        &self.base_values
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n_obs(&self) -> usize {
        self.values.nrows()
    }

    /// Mean absolute attribution per column.
    pub fn mean_abs(&self) -> Vec<f64> {
        let s = self.n_obs().max(1) as f64;
        self.values
            .column_iter()
            .map(|c| c.iter().map(|v| v.abs()).sum::<f64>() / s)
            .collect()
    }

    /// Row sums plus base: the reconstructed predictions.
    pub fn reconstructed(&self) -> Vec<f64> {
        self.values
            .row_iter()
            .zip(&self.base_values)
            .map(|(r, b)| r.sum() + b)
            .collect()
    }

    /// Writes `obs_id,base,<names...>`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
        let mut header = vec!["obs_id".to_owned(), "base".to_owned()];
        header.extend(self.names.iter().cloned());
        w.write_record(&header).map_err(|e| Error::csv(path, e))?;
        for (i, row) in self.values.row_iter().enumerate() {
            let mut rec = vec![i.to_string(), self.base_values[i].to_string()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec).map_err(|e| Error::csv(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut r = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::csv(path, e))?;
        let header: Vec<String> = r
            .headers()
            .map_err(|e| Error::csv(path, e))?
            .iter()
            .map(str::to_owned)
            .collect();
        if header.len() < 3 || header[0] != "obs_id" || header[1] != "base" {
            return Err(Error::InvalidData(format!(
                "{}: expected header 'obs_id,base,<columns...>'",
                path.display()
            )));
        }
        let k = header.len() - 2;
        let mut flat = Vec::new();
        let mut base = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| Error::csv(path, e))?;
            for (j, field) in rec.iter().enumerate().skip(1) {
                let v: f64 = field.parse().map_err(|_| {
                    Error::InvalidData(format!("{}: row {i}, column '{}': bad number '{field}'", path.display(), header[j]))
                })?;
                if !v.is_finite() {
                    return Err(Error::InvalidData(format!("{}: row {i}: non-finite value", path.display())));
                }
                if j == 1 {
                    base.push(v);
                } else {
                    flat.push(v);
                }
            }
        }
        if base.is_empty() {
            return Err(Error::InvalidData(format!("{}: no observations", path.display())));
        }
        let values = DMatrix::from_row_slice(base.len(), k, &flat);
        ShapMatrix::new(values, base, header[2..].to_vec())
    }
}
