use alloc::vec::Vec;

use num_traits::Float;

use super::NnParams;
use crate::dataset::Dataset;
use crate::error::Result;
use crate::estimate::IdEstimate;
use crate::geometry::knn;

/// `ln 2 / ln(T_k / T_{ceil(k/2)})`, or `None` when the ratio is not above 1.
pub fn mada_pointwise(t_half: f64, t_k: f64) -> Option<f64> {
    if !(t_half > 0.0) {
        return None;
    }
    let ratio = t_k / t_half;
    if !(ratio > 1.0) || !ratio.is_finite() {
        return None;
    }
    Some(core::f64::consts::LN_2 / ratio.ln())
}

/// Manifold-adaptive fractal dimension, pooled by harmonic mean.
pub fn mada_id(data: &Dataset, params: &NnParams) -> Result<IdEstimate> {
    let n = data.n_obj();
    params.check_k(n, 2)?;
    let k = params.k;
    let half = k.div_ceil(2);
    let g = knn(data, k)?;
    let vals: Vec<f64> = (0..n)
        .filter_map(|i| mada_pointwise(g.dist(i, half), g.dist(i, k)))
        .collect();
    let skipped = n - vals.len();
    let base = IdEstimate::new("MADA", f64::NAN)
        .param("k", k)
        .diag("n_skipped", skipped);
    if vals.is_empty() {
        return Ok(base.diag("reason", "no point with T_k > T_(k/2)"));
    }
    let inv: f64 = vals.iter().map(|v| 1.0 / v).sum();
    let mut e = base;
    e.set_value(vals.len() as f64 / inv);
    Ok(e)
}
