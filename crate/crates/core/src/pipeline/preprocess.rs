use alloc::vec::Vec;

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{param_err, IdError, Result};
use crate::rng;

/// A `rows × cols` size limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cap {
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub max_rows: usize,
    pub max_rows_knn_mada: usize,
    pub danco_cap: Cap,
    pub ess_cap: Cap,
    /// Max-abs difference under which two rows (or columns) of the scaled
    /// data count as duplicates.
    pub dedup_tolerance: f64,
    pub seed: u64,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            max_rows: 100_000,
            max_rows_knn_mada: 20_000,
            danco_cap: Cap {
                rows: 10_000,
                cols: 100,
            },
            ess_cap: Cap {
                rows: 2_000,
                cols: 20,
            },
            dedup_tolerance: 1e-8,
            seed: 0,
        }
    }
}

impl PreprocessConfig {
    pub fn validate(&self) -> Result<()> {
        let caps = [
            self.max_rows,
            self.max_rows_knn_mada,
            self.danco_cap.rows,
            self.danco_cap.cols,
        ];
        if caps
            .iter()
            .chain(&[self.ess_cap.rows, self.ess_cap.cols])
            .any(|&c| c == 0)
        {
            return param_err("caps must be positive");
        }
        if self.ess_cap.rows > self.danco_cap.rows || self.ess_cap.cols > self.danco_cap.cols {
            return param_err("the ESS cap must not exceed the DANCo cap");
        }
        if !(self.dedup_tolerance >= 0.0) {
            return param_err("dedup tolerance must be nonnegative");
        }
        Ok(())
    }
}

/// Scales every column to `[0, 1]`, dropping constant columns.
pub fn min_max_scale(data: &Dataset) -> Result<Dataset> {
    let d = data.n_var();
    let mut lo = alloc::vec![f64::INFINITY; d];
    let mut hi = alloc::vec![f64::NEG_INFINITY; d];
    for r in data.rows() {
        for (j, &x) in r.iter().enumerate() {
            lo[j] = lo[j].min(x);
            hi[j] = hi[j].max(x);
        }
    }
    let keep: Vec<usize> = (0..d).filter(|&j| hi[j] > lo[j]).collect();
    if keep.is_empty() {
        return Err(IdError::DegenerateData("all columns are constant".into()));
    }
    let mut values = Vec::with_capacity(data.n_obj() * keep.len());
    for r in data.rows() {
        values.extend(
            keep.iter()
                .map(|&j| ((r[j] - lo[j]) / (hi[j] - lo[j])).clamp(0.0, 1.0)),
        );
    }
    let mut out = Dataset::new(data.name(), data.n_obj(), keep.len(), values)?;
    if let Some(l) = data.labels() {
        out = out.with_labels(l.to_vec())?;
    }
    Ok(out)
}

/// Drops every column within `tol` (max-abs) of an earlier kept column.
pub fn dedup_columns(data: &Dataset, tol: f64) -> Result<Dataset> {
    let d = data.n_var();
    let n = data.n_obj();
    let col = |j: usize| (0..n).map(move |i| data.get(i, j));
    let mut keep: Vec<usize> = Vec::with_capacity(d);
    for j in 0..d {
        let dup = keep
            .iter()
            .any(|&k| col(j).zip(col(k)).all(|(a, b)| (a - b).abs() <= tol));
        if !dup {
            keep.push(j);
        }
    }
    if keep.len() == d {
        return Ok(data.clone());
    }
    data.select_columns(&keep)
}

/// Drops every row within `tol` (max-abs) of an earlier kept row.
pub fn dedup_rows(data: &Dataset, tol: f64) -> Result<Dataset> {
    let n = data.n_obj();
    // Candidates share the first coordinate up to `tol`.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| data.get(a, 0).total_cmp(&data.get(b, 0)).then(a.cmp(&b)));
    let mut pos = alloc::vec![0usize; n];
    for (p, &i) in order.iter().enumerate() {
        pos[i] = p;
    }
    let close = |a: usize, b: usize| {
        data.row(a)
            .iter()
            .zip(data.row(b))
            .all(|(x, y)| (x - y).abs() <= tol)
    };
    let mut kept = alloc::vec![false; n];
    for i in 0..n {
        let x0 = data.get(i, 0);
        let p = pos[i];
        let mut dup = false;
        for &j in order[p + 1..].iter() {
            if data.get(j, 0) - x0 > tol {
                break;
            }
            if j < i && kept[j] && close(i, j) {
                dup = true;
                break;
            }
        }
        if !dup {
            for &j in order[..p].iter().rev() {
                if x0 - data.get(j, 0) > tol {
                    break;
                }
                if j < i && kept[j] && close(i, j) {
                    dup = true;
                    break;
                }
            }
        }
        kept[i] = !dup;
    }
    let idx: Vec<usize> = (0..n).filter(|&i| kept[i]).collect();
    if idx.len() == n {
        return Ok(data.clone());
    }
    data.select_rows(&idx)
}

/// Uniform subsample of `max_rows` rows without replacement, in original
/// order. Returns the data unchanged when it is small enough.
pub fn subsample_rows(data: &Dataset, max_rows: usize, r: &mut rng::Rng) -> Result<Dataset> {
    let n = data.n_obj();
    if n <= max_rows {
        return Ok(data.clone());
    }
    let mut idx = sample(r, n, max_rows).into_vec();
    idx.sort_unstable();
    data.select_rows(&idx)
}

/// Min-max scaling, duplicate removal and row cap, in that order.
pub fn preprocess(data: &Dataset, config: &PreprocessConfig) -> Result<Dataset> {
    config.validate()?;
    let scaled = min_max_scale(data)?;
    let cols = dedup_columns(&scaled, config.dedup_tolerance)?;
    let rows = dedup_rows(&cols, config.dedup_tolerance)?;
    let mut r = rng::stream(config.seed, &["preprocess", data.name()]);
    subsample_rows(&rows, config.max_rows, &mut r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scales_columns() {
        let d =
            Dataset::from_rows("x", &[[2.0, 5.0, 1.0], [4.0, 5.0, 0.0], [6.0, 5.0, 2.0]]).unwrap();
        let s = min_max_scale(&d).unwrap();
        assert_eq!(s.n_var(), 2);
        assert_eq!(s.values(), &[0.0, 0.5, 0.5, 0.0, 1.0, 1.0]);
        let c = Dataset::from_rows("c", &[[1.0], [1.0]]).unwrap();
        assert!(matches!(min_max_scale(&c), Err(IdError::DegenerateData(_))));
    }

    #[test]
    fn drops_duplicate_columns_and_rows() {
        let d = Dataset::from_rows(
            "x",
            &[
                [0.0, 0.0, 1.0],
                [1.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
                [0.5, 0.5, 0.5],
            ],
        )
        .unwrap();
        let c = dedup_columns(&d, 1e-8).unwrap();
        assert_eq!(c.n_var(), 2);
        let r = dedup_rows(&c, 1e-8).unwrap();
        assert_eq!(r.n_obj(), 3);
        assert_eq!(r.row(2), &[0.5, 0.5]);
    }

    #[test]
    fn near_duplicates_within_tolerance() {
        let d = Dataset::from_rows(
            "x",
            &[[0.3, 0.1], [0.3 + 5e-9, 0.1 - 5e-9], [0.3 - 5e-9, 0.2]],
        )
        .unwrap();
        let r = dedup_rows(&d, 1e-8).unwrap();
        assert_eq!(r.n_obj(), 2);
        assert_eq!(r.row(1), d.row(2));
    }

    #[test]
    fn caps_rows_reproducibly() {
        let rows: Vec<[f64; 2]> = (0..500).map(|i| [i as f64, (i % 7) as f64]).collect();
        let d = Dataset::from_rows("x", &rows).unwrap();
        let cfg = PreprocessConfig {
            max_rows: 100,
            seed: 4,
            ..Default::default()
        };
        let a = preprocess(&d, &cfg).unwrap();
        let b = preprocess(&d, &cfg).unwrap();
        assert_eq!(a.n_obj(), 100);
        assert_eq!(a, b);
    }
}
