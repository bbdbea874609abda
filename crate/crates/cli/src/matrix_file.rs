//! JSON matrix documents.
//!
//! ```json
//! {"dim": n, "label_offset": k, "labels": [...], "re": [[...]], "im": [[...]], "meta": {...}}
//! ```
//!
//! Real and imaginary parts are stored as separate `n × n` row arrays.

use std::fs;
use std::path::Path;

use fuzzyds_core::numerics::ComplexMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub label_offset: i64,
    pub labels: Vec<Value>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
    #[serde(default)]
    pub meta: Map<String, Value>,
}

impl MatrixFile {
    /// Integer labels `index + label_offset`.
    pub fn with_offset_labels(matrix: &ComplexMatrix, meta: Map<String, Value>) -> Self {
        let labels = (0..matrix.dim()).map(|i| Value::from(matrix.label(i))).collect();
        Self::new(matrix, labels, meta)
    }

    pub fn new(matrix: &ComplexMatrix, labels: Vec<Value>, meta: Map<String, Value>) -> Self {
        let n = matrix.dim();
        let rows = |part: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..n).map(|i| matrix.row(i).iter().map(part).collect()).collect()
        };
        Self {
            dim: n,
            label_offset: matrix.label_offset(),
            labels,
            re: rows(|z| z.re),
            im: rows(|z| z.im),
            meta,
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, CliError> {
        let n = self.dim;
        let shape_ok = |a: &Vec<Vec<f64>>| a.len() == n && a.iter().all(|row| row.len() == n);
        if !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(CliError::Config(format!(
                "matrix file: re/im arrays must be {n}x{n}"
            )));
        }
        let entries = self
            .re
            .iter()
            .zip(&self.im)
            .flat_map(|(r, i)| r.iter().zip(i).map(|(&a, &b)| Complex64::new(a, b)))
            .collect();
        ComplexMatrix::from_row_major(n, self.label_offset, entries)
            .map_err(|e| CliError::Config(format!("matrix file: {e}")))
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string(self).expect("matrix documents serialize");
        fs::write(path, text).map_err(|e| CliError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: invalid matrix file: {e}", path.display())))
    }
}
