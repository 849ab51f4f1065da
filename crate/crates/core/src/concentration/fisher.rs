use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;
use rand::Rng as _;
use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{param_err, IdError, Result};
use crate::estimate::IdEstimate;
use crate::geometry::pca;
use crate::math::bisect_increasing;
use crate::rng;

/// Above this many points the inseparability fraction is estimated from
/// `PAIR_SAMPLE_POINTS²` random ordered pairs.
pub const PAIR_SAMPLE_POINTS: usize = 5000;

/// Search range for the sphere-model inversion.
const N_MIN: f64 = 1e-3;
const N_MAX: f64 = 1e4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FisherParams {
    pub alpha: f64,
    pub alpha_grid: Vec<f64>,
    pub condition_threshold: f64,
}

impl Default for FisherParams {
    fn default() -> Self {
        FisherParams {
            alpha: 0.8,
            alpha_grid: (0..20).map(|i| 0.6 + 0.02 * i as f64).collect(),
            condition_threshold: 10.0,
        }
    }
}

impl FisherParams {
    fn validate(&self) -> Result<()> {
        let ok = |a: f64| a > 0.0 && a < 1.0;
        if !ok(self.alpha) || !self.alpha_grid.iter().all(|&a| ok(a)) {
            return param_err("FisherS alphas must lie in (0, 1)");
        }
        if self.alpha_grid.windows(2).any(|w| w[1] <= w[0]) {
            return param_err("FisherS alpha grid must be strictly ascending");
        }
        if !(self.condition_threshold >= 1.0) {
            return param_err("FisherS condition threshold must be >= 1");
        }
        Ok(())
    }
}

/// Probability that a random point of the unit sphere in `R^n` is not
/// α-separable from a fixed point:
/// `(1 - α²)^((n - 1) / 2) / (α √(2πn))`. Strictly decreasing in `n`.
pub fn sphere_inseparability(alpha: f64, n: f64) -> f64 {
    ((n - 1.0) / 2.0 * (1.0 - alpha * alpha).ln() - alpha.ln() - 0.5 * (2.0 * PI * n).ln()).exp()
}

/// The `n` at which the sphere model equals `p`. `None` when `p` exceeds
/// the model on the whole search range; capped at the upper end.
pub fn invert_sphere_model(alpha: f64, p: f64) -> Option<f64> {
    if !(p > 0.0) {
        return None;
    }
    let target = p.ln();
    let f = |n: f64| target - sphere_inseparability(alpha, n).ln();
    if f(N_MIN) >= 0.0 {
        return None;
    }
    if f(N_MAX) <= 0.0 {
        return Some(N_MAX);
    }
    Some(bisect_increasing(f, N_MIN, N_MAX, 1e-13))
}

/// Centre, keep principal components with `λ_1 / λ_i <= threshold`, whiten
/// them and project every point onto the unit sphere. Points at the centre
/// are dropped.
pub fn fisher_preprocess(data: &Dataset, condition_threshold: f64) -> Result<Dataset> {
    let p = pca(data)?;
    let spec = p.spectrum();
    let lam = spec.eigenvalues();
    if lam.is_empty() || !(lam[0] > 0.0) {
        return Err(IdError::DegenerateData("zero variance".into()));
    }
    let m = lam
        .iter()
        .take_while(|&&l| l > 0.0 && lam[0] / l <= condition_threshold)
        .count();
    let scale: Vec<f64> = lam[..m].iter().map(|l| 1.0 / l.sqrt()).collect();
    let mut values = Vec::with_capacity(data.n_obj() * m);
    let mut buf = Vec::with_capacity(m);
    let mut kept = 0;
    for r in data.rows() {
        p.project_row(r, m, &mut buf);
        buf.iter_mut().zip(&scale).for_each(|(x, s)| *x *= s);
        let norm = buf.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            values.extend(buf.iter().map(|x| x / norm));
            kept += 1;
        }
    }
    if kept < 2 {
        return Err(IdError::DegenerateData(
            "fewer than two points off the centre".into(),
        ));
    }
    Dataset::new(data.name(), kept, m, values)
}

/// Mean inseparability fraction for each threshold: the share of ordered
/// pairs `(x, y)`, `x != y`, with `<x, y> > α <x, x>`. Points are expected on
/// the unit sphere.
pub fn inseparability_profile(points: &Dataset, alphas: &[f64], seed: u64) -> Vec<f64> {
    let n = points.n_obj();
    let mut order: Vec<(f64, usize)> = alphas
        .iter()
        .copied()
        .enumerate()
        .map(|(i, a)| (a, i))
        .collect();
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let sorted: Vec<f64> = order.iter().map(|o| o.0).collect();
    let mut hist = alloc::vec![0u64; alphas.len() + 1];
    let dot = |i: usize, j: usize| -> f64 {
        points
            .row(i)
            .iter()
            .zip(points.row(j))
            .map(|(a, b)| a * b)
            .sum()
    };
    let self_norm = |i: usize| dot(i, i);
    let total = if n <= PAIR_SAMPLE_POINTS {
        for i in 0..n {
            let ni = self_norm(i);
            for j in (i + 1)..n {
                let v = dot(i, j);
                // Unit norms make the relation symmetric.
                let pos = sorted.partition_point(|&a| a * ni < v);
                hist[pos] += 2;
            }
        }
        (n * (n - 1)) as f64
    } else {
        let mut r = rng::stream(seed, &["FisherS", "pairs"]);
        let m = PAIR_SAMPLE_POINTS * PAIR_SAMPLE_POINTS;
        for _ in 0..m {
            let i = r.random_range(0..n);
            let mut j = r.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let v = dot(i, j);
            let ni = self_norm(i);
            let pos = sorted.partition_point(|&a| a * ni < v);
            hist[pos] += 1;
        }
        m as f64
    };
    // Pairs in bin `pos` exceed the first `pos` sorted thresholds.
    let mut out = alloc::vec![0.0; alphas.len()];
    let mut acc = 0u64;
    for t in (0..alphas.len()).rev() {
        acc += hist[t + 1];
        out[order[t].1] = acc as f64 / total;
    }
    out
}

/// Fisher-separability estimate.
pub fn fisher_s_id(data: &Dataset, params: &FisherParams, seed: u64) -> Result<IdEstimate> {
    params.validate()?;
    if data.n_obj() < 10 {
        return param_err("FisherS needs at least 10 points");
    }
    let sphere = fisher_preprocess(data, params.condition_threshold)?;
    let n = sphere.n_obj();
    let mut alphas = params.alpha_grid.clone();
    alphas.push(params.alpha);
    let p = inseparability_profile(&sphere, &alphas, seed);
    let floor = 1.0 / (2.0 * (n as f64) * (n as f64));
    let profile: Vec<f64> = alphas[..alphas.len() - 1]
        .iter()
        .zip(&p)
        .map(|(&a, &pv)| {
            invert_sphere_model(a, if pv > 0.0 { pv } else { floor }).unwrap_or(f64::NAN)
        })
        .collect();
    let p_sel = p[alphas.len() - 1];
    let saturated = p_sel <= 0.0;
    let used = if saturated { floor } else { p_sel };
    let base = IdEstimate::new("FisherS", f64::NAN)
        .param("alpha", params.alpha)
        .param("condition_threshold", params.condition_threshold)
        .diag("n_components", sphere.n_var())
        .diag("inseparability", p_sel)
        .diag("saturated", saturated)
        .diag("profile_alpha", params.alpha_grid.clone())
        .diag("profile_id", profile);
    match invert_sphere_model(params.alpha, used) {
        Some(v) => {
            let mut e = base;
            e.set_value(v);
            Ok(e)
        }
        None => Ok(base.diag("reason", "inseparability exceeds the sphere model maximum")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_decreases_in_n() {
        for a in FisherParams::default().alpha_grid {
            let mut prev = f64::INFINITY;
            for n in 1..=100 {
                let v = sphere_inseparability(a, n as f64);
                assert!(v < prev);
                prev = v;
            }
        }
    }

    #[test]
    fn inversion_round_trip() {
        for &(a, n) in &[(0.8, 3.0), (0.6, 12.5), (0.95, 40.0)] {
            let p = sphere_inseparability(a, n);
            assert!((invert_sphere_model(a, p).unwrap() - n).abs() < 1e-8);
        }
        assert_eq!(invert_sphere_model(0.8, 0.0), None);
    }

    #[test]
    fn profile_counts_ordered_pairs() {
        // Three unit vectors: two equal, one orthogonal.
        let d = Dataset::from_rows("x", &[[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let p = inseparability_profile(&d, &[0.5, 0.99], 0);
        // Ordered pairs: (0,1) and (1,0) inseparable out of 6.
        assert_eq!(p, [2.0 / 6.0, 2.0 / 6.0]);
    }

    #[test]
    fn cross_polytope_is_saturated() {
        // ±e_i in R^8: no pair has inner product above 0.8.
        let mut rows = Vec::new();
        for i in 0..8 {
            let mut r = [0.0; 8];
            r[i] = 1.0;
            rows.push(r);
            r[i] = -1.0;
            rows.push(r);
        }
        let d = Dataset::from_rows("x", &rows).unwrap();
        let e = fisher_s_id(&d, &FisherParams::default(), 0).unwrap();
        assert_eq!(e.diagnostics["saturated"].as_bool(), Some(true));
        assert!(e.valid && e.value > 8.0);
    }

    #[test]
    fn rejects_bad_grid() {
        let p = FisherParams {
            alpha_grid: alloc::vec![0.9, 0.7],
            ..Default::default()
        };
        let d = Dataset::from_rows("x", &[[0.0; 2]; 12]).unwrap();
        assert!(fisher_s_id(&d, &p, 0).is_err());
    }
}
