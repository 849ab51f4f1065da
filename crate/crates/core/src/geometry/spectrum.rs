use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use super::eigen::{symmetric_eigen, SymmetricEigen};
use crate::dataset::Dataset;
use crate::error::{param_err, Result};

/// Eigenvalues below this fraction of the largest are set to zero.
pub const CLAMP_RELATIVE: f64 = 1e-10;

/// Descending, nonnegative covariance eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    total: f64,
}

impl Spectrum {
    /// Sorts descending and clamps tiny or negative values to zero.
    pub fn new(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
        let top = eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
        for v in eigenvalues.iter_mut() {
            if *v < CLAMP_RELATIVE * top || *v < 0.0 {
                *v = 0.0;
            }
        }
        let total = eigenvalues.iter().sum();
        Spectrum { eigenvalues, total }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Number of strictly positive eigenvalues.
    pub fn rank(&self) -> usize {
        self.eigenvalues.iter().filter(|&&v| v > 0.0).count()
    }

    /// Every eigenvalue multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Spectrum {
        Spectrum::new(self.eigenvalues.iter().map(|v| v * c).collect())
    }
}

/// Column means and the sample covariance (divisor `n - 1`), row-major.
pub fn covariance_matrix(data: &Dataset) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = data.n_obj();
    let d = data.n_var();
    if n < 2 {
        return param_err("covariance needs at least two points");
    }
    let mut mean = vec![0.0; d];
    for r in data.rows() {
        for (m, x) in mean.iter_mut().zip(r) {
            *m += x;
        }
    }
    for m in mean.iter_mut() {
        *m /= n as f64;
    }
    let mut cov = vec![0.0; d * d];
    let mut centered = vec![0.0; d];
    for r in data.rows() {
        for ((c, x), m) in centered.iter_mut().zip(r).zip(&mean) {
            *c = x - m;
        }
        for i in 0..d {
            let ci = centered[i];
            if ci == 0.0 {
                continue;
            }
            let row = &mut cov[i * d..(i + 1) * d];
            for j in i..d {
                row[j] += ci * centered[j];
            }
        }
    }
    let denom = (n - 1) as f64;
    for i in 0..d {
        for j in i..d {
            let v = cov[i * d + j] / denom;
            cov[i * d + j] = v;
            cov[j * d + i] = v;
        }
    }
    Ok((mean, cov))
}

/// Covariance spectrum, truncated to `min(n_obj - 1, n_var)` entries.
pub fn covariance_spectrum(data: &Dataset) -> Result<Spectrum> {
    let p = pca(data)?;
    Ok(p.spectrum())
}

/// Principal axes of a dataset.
#[derive(Debug, Clone)]
pub struct Pca {
    pub mean: Vec<f64>,
    pub eigen: SymmetricEigen,
    n_obj: usize,
}

impl Pca {
    pub fn spectrum(&self) -> Spectrum {
        let len = (self.n_obj - 1).min(self.eigen.n);
        Spectrum::new(self.eigen.values[..len].to_vec())
    }

    /// Centred coordinates of `row` along the first `m` axes.
    pub fn project_row(&self, row: &[f64], m: usize, out: &mut Vec<f64>) {
        let d = self.eigen.n;
        out.clear();
        for j in 0..m {
            let s = row[..d]
                .iter()
                .zip(&self.mean)
                .enumerate()
                .map(|(i, (x, m))| (x - m) * self.eigen.vectors[i * d + j])
                .sum();
            out.push(s);
        }
    }
}

pub fn pca(data: &Dataset) -> Result<Pca> {
    let (mean, cov) = covariance_matrix(data)?;
    let eigen = symmetric_eigen(&cov, data.n_var());
    Ok(Pca {
        mean,
        eigen,
        n_obj: data.n_obj(),
    })
}

/// Centred coordinates on the top `n_components` principal axes.
pub fn pca_project(data: &Dataset, n_components: usize) -> Result<Dataset> {
    if n_components == 0 || n_components > data.n_var() {
        return param_err(alloc::format!(
            "n_components = {} must be in [1, {}]",
            n_components,
            data.n_var()
        ));
    }
    let p = pca(data)?;
    let mut values = Vec::with_capacity(data.n_obj() * n_components);
    let mut buf = Vec::with_capacity(n_components);
    for r in data.rows() {
        p.project_row(r, n_components, &mut buf);
        values.extend_from_slice(&buf);
    }
    let out = Dataset::new(data.name(), data.n_obj(), n_components, values)?;
    match data.labels() {
        Some(l) => out.with_labels(l.to_vec()),
        None => Ok(out),
    }
}
