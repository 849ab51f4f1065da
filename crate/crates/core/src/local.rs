//! Local ID: a global estimator applied to the closed k-NN neighbourhood of
//! every point.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use serde::Serialize;

use crate::concentration::CalibrationSource;
use crate::dataset::Dataset;
use crate::error::{param_err, Result};
use crate::geometry::knn;
use crate::methods::{estimate_with, EstimatorParams, Method};

pub const DEFAULT_LOCAL_K: usize = 100;

/// Default neighbourhood size for `n_obj` points.
pub fn default_local_k(n_obj: usize) -> usize {
    DEFAULT_LOCAL_K.min(n_obj.saturating_sub(1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalIdField {
    /// Per-point estimates; `NaN` where the estimate failed.
    pub values: Vec<f64>,
    pub valid: Vec<bool>,
    pub k: usize,
    pub method: String,
    pub n_invalid: usize,
}

/// Estimates `method` on `{x_i} ∪ kNN(x_i)` for every point. Failures are
/// flagged per point.
pub fn local_estimate(
    data: &Dataset,
    method: Method,
    k: usize,
    params: &EstimatorParams,
    seed: u64,
    calibration: &dyn CalibrationSource,
) -> Result<LocalIdField> {
    let n = data.n_obj();
    if k == 0 || k >= n {
        return param_err(alloc::format!(
            "local k = {k} must lie in [1, {}]",
            n.saturating_sub(1)
        ));
    }
    let need = method.min_points(params);
    if k + 1 < need {
        return param_err(alloc::format!(
            "{method} needs neighbourhoods of at least {need} points (k >= {})",
            need - 1
        ));
    }
    // One table for all neighbourhoods.
    let fixed: Option<Arc<_>> = match method {
        Method::Danco => Some(calibration.calibration(&params.danco)?),
        _ => None,
    };
    let source: &dyn CalibrationSource = match &fixed {
        Some(c) => c,
        None => calibration,
    };
    let g = knn(data, k)?;
    let mut values = Vec::with_capacity(n);
    let mut valid = Vec::with_capacity(n);
    let mut idx = Vec::with_capacity(k + 1);
    for i in 0..n {
        idx.clear();
        idx.push(i);
        idx.extend_from_slice(g.neighbors(i));
        let hood = data.select_rows(&idx)?;
        match estimate_with(&hood, method, params, seed, source) {
            Ok(e) if e.valid => {
                values.push(e.value);
                valid.push(true);
            }
            _ => {
                values.push(f64::NAN);
                valid.push(false);
            }
        }
    }
    let n_invalid = valid.iter().filter(|v| !**v).count();
    Ok(LocalIdField {
        values,
        valid,
        k,
        method: String::from(method.id()),
        n_invalid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concentration::ComputeCalibration;

    #[test]
    fn k_one_rejected_for_lpca() {
        let rows: Vec<[f64; 2]> = (0..10).map(|i| [i as f64, (i * i) as f64]).collect();
        let d = Dataset::from_rows("x", &rows).unwrap();
        let p = EstimatorParams::default();
        assert!(local_estimate(&d, Method::LpcaFo, 1, &p, 0, &ComputeCalibration).is_err());
        assert!(local_estimate(&d, Method::LpcaFo, 10, &p, 0, &ComputeCalibration).is_err());
        let f = local_estimate(&d, Method::LpcaFo, 3, &p, 0, &ComputeCalibration).unwrap();
        assert_eq!(f.values.len(), 10);
        assert_eq!(f.n_invalid, 0);
    }
}
