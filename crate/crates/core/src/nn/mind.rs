use alloc::vec::Vec;

use num_traits::Float;
use serde::Serialize;

use super::NnParams;
use crate::dataset::Dataset;
use crate::error::{param_err, Result};
use crate::estimate::IdEstimate;
use crate::geometry::knn;
use crate::math::bisect_increasing;

/// Upper bound of the MiND_ML search range (also capped by `n_var`).
pub const MIND_MAX_DIM: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MindVersion {
    /// Integer maximizer.
    MLi,
    /// Continuous maximizer.
    MLk,
}

/// `L(d) = n ln(k d) + (d - 1) Σ ln ρ_i + (k - 1) Σ ln(1 - ρ_i^d)`.
pub fn mind_log_likelihood(log_rho: &[f64], k: usize, d: f64) -> f64 {
    let n = log_rho.len() as f64;
    let kf = k as f64;
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for &lr in log_rho {
        s1 += lr;
        let x = (d * lr).exp();
        s2 += (-x).ln_1p();
    }
    n * (kf * d).ln() + (d - 1.0) * s1 + (kf - 1.0) * s2
}

/// `L'(d) = n / d + Σ ln ρ_i - (k - 1) Σ ρ_i^d ln ρ_i / (1 - ρ_i^d)`.
pub fn mind_log_likelihood_slope(log_rho: &[f64], k: usize, d: f64) -> f64 {
    let n = log_rho.len() as f64;
    let mut s = 0.0;
    for &lr in log_rho {
        let x = (d * lr).exp();
        s += lr - (k as f64 - 1.0) * x * lr / (1.0 - x);
    }
    n / d + s
}

/// Maximizes the MiND likelihood over `[1, d_cap]` given precomputed
/// `ln ρ` values (`ρ` in `(0, 1)`).
pub fn mind_ml_from_ratios(log_rho: &[f64], k: usize, d_cap: usize, version: MindVersion) -> f64 {
    let d_cap = d_cap.max(1);
    match version {
        MindVersion::MLi => {
            let mut best = 1;
            let mut best_l = f64::NEG_INFINITY;
            for d in 1..=d_cap {
                let l = mind_log_likelihood(log_rho, k, d as f64);
                if l > best_l {
                    best_l = l;
                    best = d;
                }
            }
            best as f64
        }
        MindVersion::MLk => {
            if d_cap == 1 {
                return 1.0;
            }
            // L is strictly concave, so its maximizer on the bracket is the
            // root of L' (or an endpoint).
            let neg_slope = |d: f64| -mind_log_likelihood_slope(log_rho, k, d);
            let hi = d_cap as f64;
            if neg_slope(1.0) >= 0.0 {
                1.0
            } else if neg_slope(hi) <= 0.0 {
                hi
            } else {
                bisect_increasing(neg_slope, 1.0, hi, 1e-15)
            }
        }
    }
}

/// MiND_ML: likelihood of `ρ = T_1 / T_{k+1}`, the nearest-neighbour
/// distance normalized by the radius of the ball holding `k` neighbours.
pub fn mind_ml_id(data: &Dataset, params: &NnParams, version: MindVersion) -> Result<IdEstimate> {
    let n = data.n_obj();
    let k = params.k;
    if k < 2 {
        return param_err("MiND_ML needs k >= 2");
    }
    if k + 1 >= n {
        return param_err(alloc::format!("MiND_ML needs more than {} points", k + 1));
    }
    let g = knn(data, k + 1)?;
    let log_rho: Vec<f64> = (0..n)
        .filter_map(|i| {
            let rho = g.dist(i, 1) / g.dist(i, k + 1);
            (rho > 0.0 && rho < 1.0).then(|| rho.ln())
        })
        .collect();
    let d_cap = data.n_var().min(MIND_MAX_DIM);
    let id = match version {
        MindVersion::MLi => "MiND_MLi",
        MindVersion::MLk => "MiND_MLk",
    };
    let base = IdEstimate::new(id, f64::NAN)
        .param("k", k)
        .param("d_cap", d_cap)
        .diag("n_skipped", n - log_rho.len());
    if log_rho.is_empty() {
        return Ok(base.diag("reason", "no point with 0 < T_1 < T_(k+1)"));
    }
    let mut e = base;
    e.set_value(mind_ml_from_ratios(&log_rho, k, d_cap, version));
    Ok(e)
}
