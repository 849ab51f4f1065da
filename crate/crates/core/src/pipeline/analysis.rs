use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Float;
use serde::Serialize;

use crate::concentration::CalibrationSource;
use crate::dataset::Dataset;
use crate::error::{param_err, IdError, Result};
use crate::estimate::IdEstimate;
use crate::math::{mean, std_pop};
use crate::methods::{estimate_with, EstimatorParams, Method};

/// `ID(data with every column duplicated) / ID(data)`.
pub fn duplication_sensitivity(
    data: &Dataset,
    method: Method,
    params: &EstimatorParams,
    seed: u64,
    calibration: &dyn CalibrationSource,
) -> Result<f64> {
    let base = estimate_with(data, method, params, seed, calibration)?;
    let dup = estimate_with(&data.duplicate_columns(), method, params, seed, calibration)?;
    for e in [&base, &dup] {
        if !e.valid {
            return Err(IdError::InvalidEstimate(alloc::format!(
                "{method}: {}",
                e.reason().unwrap_or("invalid estimate")
            )));
        }
    }
    Ok(dup.value / base.value)
}

/// Share of valid estimates.
pub fn validity_rate(estimates: &[IdEstimate]) -> f64 {
    if estimates.is_empty() {
        return 0.0;
    }
    estimates.iter().filter(|e| e.valid).count() as f64 / estimates.len() as f64
}

/// Per method: the coefficient of variation (population std / mean) of its
/// valid estimates within each group, averaged over groups. `None` when
/// undefined (no group with two valid values, or a zero mean).
pub fn group_cv(groups: &[Vec<IdEstimate>]) -> Result<BTreeMap<String, Option<f64>>> {
    let mut by_method: BTreeMap<String, Vec<Vec<f64>>> = BTreeMap::new();
    for (g, group) in groups.iter().enumerate() {
        let mut seen: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for e in group {
            let v = seen.entry(e.method.as_str()).or_default();
            if e.valid {
                v.push(e.value);
            }
        }
        for (m, v) in seen {
            let slot = by_method.entry(String::from(m)).or_default();
            slot.resize(g, Vec::new());
            slot.push(v);
        }
    }
    let mut out = BTreeMap::new();
    for group in groups {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for e in group {
            *counts.entry(e.method.as_str()).or_default() += 1;
        }
        if counts.values().any(|&c| c < 2) {
            return param_err("every group needs at least two datasets per method");
        }
    }
    for (m, per_group) in by_method {
        let mut cvs = Vec::new();
        let mut undefined = false;
        for v in per_group.iter().filter(|v| v.len() >= 2) {
            let mu = mean(v);
            if mu == 0.0 {
                undefined = true;
                break;
            }
            cvs.push(std_pop(v) / mu.abs());
        }
        out.insert(m, (!undefined && !cvs.is_empty()).then(|| mean(&cvs)));
    }
    Ok(out)
}

/// `T = c · N_obj^α · N_var^β` fitted in log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RuntimeModel {
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub r2: f64,
}

impl RuntimeModel {
    pub fn predict(&self, n_obj: f64, n_var: f64) -> f64 {
        self.c * n_obj.powf(self.alpha) * n_var.powf(self.beta)
    }
}

/// Ordinary least squares of `ln T` on `ln N_obj` and `ln N_var`.
pub fn fit_runtime_model(timings: &[(usize, usize, f64)]) -> Result<RuntimeModel> {
    if timings.len() < 4 {
        return param_err("runtime model needs at least four timings");
    }
    let distinct = |f: &dyn Fn(&(usize, usize, f64)) -> usize| {
        let mut v: Vec<usize> = timings.iter().map(f).collect();
        v.sort_unstable();
        v.dedup();
        v.len()
    };
    if distinct(&|t| t.0) < 2 || distinct(&|t| t.1) < 2 {
        return param_err("runtime model needs two distinct N_obj and two distinct N_var");
    }
    if timings
        .iter()
        .any(|t| !(t.2 > 0.0) || !t.2.is_finite() || t.0 == 0 || t.1 == 0)
    {
        return param_err("timings must be positive");
    }
    let x1: Vec<f64> = timings.iter().map(|t| (t.0 as f64).ln()).collect();
    let x2: Vec<f64> = timings.iter().map(|t| (t.1 as f64).ln()).collect();
    let y: Vec<f64> = timings.iter().map(|t| t.2.ln()).collect();
    let (m1, m2, my) = (mean(&x1), mean(&x2), mean(&y));
    let (mut s11, mut s22, mut s12, mut s1y, mut s2y, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..y.len() {
        let (a, b, c) = (x1[i] - m1, x2[i] - m2, y[i] - my);
        s11 += a * a;
        s22 += b * b;
        s12 += a * b;
        s1y += a * c;
        s2y += b * c;
        syy += c * c;
    }
    let det = s11 * s22 - s12 * s12;
    if !(det > 1e-12 * s11 * s22) {
        return param_err("degenerate design: N_obj and N_var are collinear");
    }
    let alpha = (s1y * s22 - s2y * s12) / det;
    let beta = (s2y * s11 - s1y * s12) / det;
    let ln_c = my - alpha * m1 - beta * m2;
    let sse: f64 = (0..y.len())
        .map(|i| (y[i] - ln_c - alpha * x1[i] - beta * x2[i]).powi(2))
        .sum();
    let r2 = if syy > 0.0 {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(RuntimeModel {
        c: ln_c.exp(),
        alpha,
        beta,
        r2,
    })
}
