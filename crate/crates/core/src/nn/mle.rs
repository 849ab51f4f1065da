use alloc::vec::Vec;

use num_traits::Float;

use super::{Aggregation, NnParams, MAX_SKIP_FRACTION};
use crate::dataset::Dataset;
use crate::error::{param_err, Result};
use crate::estimate::IdEstimate;
use crate::geometry::knn;
use crate::math::mean;

/// `(1/(k-1)) Σ_{j<k} ln(T_k / T_j)`, the reciprocal of the Levina–Bickel
/// pointwise estimate. `dists` holds `T_1..T_K` ascending, `K >= k`.
pub fn mle_inverse_pointwise(dists: &[f64], k: usize) -> f64 {
    let tk = dists[k - 1];
    let s: f64 = dists[..k - 1].iter().map(|t| (tk / t).ln()).sum();
    s / (k - 1) as f64
}

/// Levina–Bickel maximum likelihood estimate averaged over `k in [k1, k2]`.
///
/// For every `k` the pointwise estimates are pooled with
/// `params.aggregation`; the per-`k` globals are then averaged. Points with a
/// zero nearest-neighbour distance are skipped.
pub fn mle_id(data: &Dataset, params: &NnParams) -> Result<IdEstimate> {
    let n = data.n_obj();
    params.check_k1_k2(n)?;
    if params.k1 < 2 {
        return param_err("MLE needs k1 >= 2");
    }
    let g = knn(data, params.k2)?;
    let ks: Vec<usize> = (params.k1..=params.k2).collect();
    let mut inv = alloc::vec![Vec::with_capacity(n); ks.len()];
    let mut skipped = 0usize;
    'points: for i in 0..n {
        let t = g.distances(i);
        if !(t[0] > 0.0) {
            skipped += 1;
            continue;
        }
        let mut row = Vec::with_capacity(ks.len());
        for &k in &ks {
            let v = mle_inverse_pointwise(t, k);
            if !(v > 0.0) || !v.is_finite() {
                skipped += 1;
                continue 'points;
            }
            row.push(v);
        }
        for (slot, v) in inv.iter_mut().zip(row) {
            slot.push(v);
        }
    }
    let base = IdEstimate::new("MLE", f64::NAN)
        .param("k1", params.k1)
        .param("k2", params.k2)
        .param(
            "aggregation",
            match params.aggregation {
                Aggregation::Mean => "mean",
                Aggregation::InverseMean => "inverse_mean",
            },
        )
        .diag("n_skipped", skipped);
    if skipped as f64 > MAX_SKIP_FRACTION * n as f64 || inv[0].is_empty() {
        return Ok(base.diag("reason", "too many points with zero neighbour distances"));
    }
    let per_k: Vec<f64> = inv
        .iter()
        .map(|v| match params.aggregation {
            Aggregation::InverseMean => 1.0 / mean(v),
            Aggregation::Mean => mean(&v.iter().map(|x| 1.0 / x).collect::<Vec<_>>()),
        })
        .collect();
    let mut e = base.diag("per_k", per_k.clone());
    e.set_value(mean(&per_k));
    Ok(e)
}
