use alloc::vec::Vec;

use num_traits::Float;
use rand::seq::index::sample;
use serde::Serialize;

use super::ScalingFit;
use crate::dataset::Dataset;
use crate::error::{param_err, Result};
use crate::estimate::IdEstimate;
use crate::geometry::knn;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnnGraphParams {
    pub k: usize,
    pub gamma: f64,
    pub n_subsamples: usize,
    /// Subsample sizes; `None` uses [`default_sizes`].
    pub sizes: Option<Vec<usize>>,
}

impl Default for KnnGraphParams {
    fn default() -> Self {
        KnnGraphParams {
            k: 5,
            gamma: 1.0,
            n_subsamples: 10,
            sizes: None,
        }
    }
}

/// Five logarithmic steps between `n / 4` and `n`, deduplicated.
pub fn default_sizes(n: usize) -> Vec<usize> {
    let lo = (n as f64 / 4.0).ln();
    let hi = (n as f64).ln();
    let mut v: Vec<usize> = (0..5)
        .map(|i| {
            if i == 4 {
                n
            } else {
                (lo + (hi - lo) * i as f64 / 4.0).exp().round() as usize
            }
        })
        .collect();
    v.dedup();
    v
}

/// Total edge weight `Σ_i Σ_{j in kNN(i)} |x_i - x_j|^γ`.
pub fn knn_graph_length(data: &Dataset, k: usize, gamma: f64) -> Result<f64> {
    let g = knn(data, k)?;
    let mut total = 0.0;
    for i in 0..data.n_obj() {
        for &d in g.distances(i) {
            total += d.powf(gamma);
        }
    }
    Ok(total)
}

/// kNN-graph length functional estimator.
///
/// `L(n) ~ n^a` with `a = 1 - γ / d`, so `d = γ / (1 - a)` where `a` is the
/// log-log slope of the mean length over random subsamples of each size.
pub fn knn_graph_id(data: &Dataset, params: &KnnGraphParams, seed: u64) -> Result<IdEstimate> {
    let n = data.n_obj();
    if params.k == 0 || !(params.gamma > 0.0) || params.n_subsamples == 0 {
        return param_err("KNN needs k > 0, gamma > 0 and at least one subsample");
    }
    let sizes = params.sizes.clone().unwrap_or_else(|| default_sizes(n));
    if sizes.len() < 2 {
        return param_err("KNN needs at least two subsample sizes");
    }
    for &s in &sizes {
        if s > n || s <= params.k {
            return param_err(alloc::format!(
                "subsample size {} must be in ({}, {}]",
                s,
                params.k,
                n
            ));
        }
    }
    let mut r = rng::stream(seed, &["KNN", "subsample"]);
    let mut pts = Vec::with_capacity(sizes.len());
    for &s in &sizes {
        let mut acc = 0.0;
        for _ in 0..params.n_subsamples {
            let len = if s == n {
                knn_graph_length(data, params.k, params.gamma)?
            } else {
                let mut idx = sample(&mut r, n, s).into_vec();
                idx.sort_unstable();
                knn_graph_length(&data.select_rows(&idx)?, params.k, params.gamma)?
            };
            acc += len;
        }
        pts.push(((s as f64).ln(), (acc / params.n_subsamples as f64).ln()));
    }
    let base = IdEstimate::new("KNN", f64::NAN)
        .param("k", params.k)
        .param("gamma", params.gamma)
        .param("n_subsamples", params.n_subsamples)
        .param("sizes", sizes.iter().map(|&s| s as f64).collect::<Vec<_>>());
    let fit = match ScalingFit::fit(pts) {
        Some(f) if f.slope.is_finite() => f,
        _ => return Ok(base.diag("reason", "graph length is not finite and positive")),
    };
    let base = base.diag("slope", fit.slope).diag("r2", fit.r2);
    if fit.slope >= 1.0 {
        return Ok(base.diag("reason", "slope >= 1"));
    }
    let mut e = base;
    e.set_value((params.gamma / (1.0 - fit.slope)).clamp(1.0, data.n_var() as f64));
    Ok(e)
}
