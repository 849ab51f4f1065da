use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use crate::error::{param_err, IdError, Result};

/// A dense row-major point cloud: `n_obj` points with `n_var` coordinates.
///
/// Every entry is finite and the row order is the identity of a point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dataset {
    name: String,
    n_obj: usize,
    n_var: usize,
    values: Vec<f64>,
    labels: Option<Vec<i64>>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        n_obj: usize,
        n_var: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        if n_obj == 0 || n_var == 0 {
            return param_err("dataset needs at least one row and one column");
        }
        if values.len() != n_obj * n_var {
            return param_err(alloc::format!(
                "expected {} values for a {}x{} matrix, got {}",
                n_obj * n_var,
                n_obj,
                n_var,
                values.len()
            ));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(IdError::NonFinite {
                row: pos / n_var,
                col: pos % n_var,
            });
        }
        Ok(Dataset {
            name: name.into(),
            n_obj,
            n_var,
            values,
            labels: None,
        })
    }

    /// Builds a dataset from a slice of equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(name: impl Into<String>, rows: &[R]) -> Result<Self> {
        let n_var = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut values = Vec::with_capacity(rows.len() * n_var);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n_var {
                return param_err(alloc::format!(
                    "row {} has {} columns, expected {}",
                    i,
                    r.len(),
                    n_var
                ));
            }
            values.extend_from_slice(r);
        }
        Dataset::new(name, rows.len(), n_var, values)
    }

    pub fn with_labels(mut self, labels: Vec<i64>) -> Result<Self> {
        if labels.len() != self.n_obj {
            return param_err("label count must equal row count");
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_obj(&self) -> usize {
        self.n_obj
    }

    pub fn n_var(&self) -> usize {
        self.n_var
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_var..(i + 1) * self.n_var]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.n_var)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n_var + col]
    }

    /// New dataset made of the given rows, in the given order. Labels follow.
    pub fn select_rows(&self, idx: &[usize]) -> Result<Dataset> {
        let mut values = Vec::with_capacity(idx.len() * self.n_var);
        for &i in idx {
            values.extend_from_slice(self.row(i));
        }
        let mut out = Dataset::new(self.name.clone(), idx.len(), self.n_var, values)?;
        if let Some(l) = &self.labels {
            out.labels = Some(idx.iter().map(|&i| l[i]).collect());
        }
        Ok(out)
    }

    /// New dataset made of the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Dataset> {
        let mut values = Vec::with_capacity(self.n_obj * cols.len());
        for r in self.rows() {
            values.extend(cols.iter().map(|&c| r[c]));
        }
        let mut out = Dataset::new(self.name.clone(), self.n_obj, cols.len(), values)?;
        out.labels = self.labels.clone();
        Ok(out)
    }

    /// Every column repeated once: `[X | X]`.
    pub fn duplicate_columns(&self) -> Dataset {
        let mut values = Vec::with_capacity(self.values.len() * 2);
        for r in self.rows() {
            values.extend_from_slice(r);
            values.extend_from_slice(r);
        }
        Dataset {
            name: self.name.clone(),
            n_obj: self.n_obj,
            n_var: self.n_var * 2,
            values,
            labels: self.labels.clone(),
        }
    }

    /// Squared Euclidean distance between rows `i` and `j`.
    #[inline]
    pub fn dist2(&self, i: usize, j: usize) -> f64 {
        sq_dist(self.row(i), self.row(j))
    }
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        s += d * d;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_non_finite() {
        let err = Dataset::new("x", 2, 2, vec![0.0, 1.0, f64::NAN, 2.0]).unwrap_err();
        assert_eq!(err, IdError::NonFinite { row: 1, col: 0 });
    }

    #[test]
    fn rejects_empty_and_ragged() {
        assert!(Dataset::new("x", 0, 2, vec![]).is_err());
        assert!(Dataset::from_rows("x", &[vec![1.0, 2.0], vec![1.0]]).is_err());
    }

    #[test]
    fn duplicate_columns_layout() {
        let d = Dataset::from_rows("x", &[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let dd = d.duplicate_columns();
        assert_eq!(dd.n_var(), 4);
        assert_eq!(dd.row(1), &[3.0, 4.0, 3.0, 4.0]);
    }
}
