use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::datasets::sphere_point;
use crate::error::{param_err, Result};
use crate::estimate::IdEstimate;
use crate::geometry::knn;
use crate::math::{bessel_ratio, harmonic_number, ln_bessel_i0, von_mises_kappa};
use crate::nn::{mind_ml_from_ratios, MindVersion, MIND_MAX_DIM};
use crate::rng;

/// Calibration settings. Every field participates in the cache key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DancoConfig {
    pub k: usize,
    pub d_max: usize,
    pub n_cal: usize,
    pub samples_per_dim: usize,
    pub seed: u64,
}

impl Default for DancoConfig {
    fn default() -> Self {
        DancoConfig {
            k: 10,
            d_max: 25,
            n_cal: 500,
            samples_per_dim: 20,
            seed: 0,
        }
    }
}

impl DancoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return param_err("DANCo needs k >= 2");
        }
        if self.d_max < 1 || self.samples_per_dim < 1 {
            return param_err("DANCo needs d_max >= 1 and samples_per_dim >= 1");
        }
        if self.n_cal <= self.k + 2 {
            return param_err("DANCo calibration sample is too small for k");
        }
        Ok(())
    }
}

/// Dataset statistics compared by DANCo: the MiND_MLk dimension and a von
/// Mises fit to the pooled angles between neighbour vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DancoStats {
    pub ml_dim: f64,
    pub nu: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DancoCalibration {
    pub config: DancoConfig,
    /// `stats[d - 1]` holds the averaged statistics for dimension `d`.
    pub stats: Vec<DancoStats>,
}

impl DancoCalibration {
    pub fn for_dim(&self, d: usize) -> Option<&DancoStats> {
        d.checked_sub(1).and_then(|i| self.stats.get(i))
    }
}

/// Supplies calibration tables, e.g. from a cache.
pub trait CalibrationSource {
    fn calibration(&self, config: &DancoConfig) -> Result<Arc<DancoCalibration>>;
}

/// Computes the calibration on every request.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComputeCalibration;

impl CalibrationSource for ComputeCalibration {
    fn calibration(&self, config: &DancoConfig) -> Result<Arc<DancoCalibration>> {
        danco_calibrate(config).map(Arc::new)
    }
}

/// A fixed table; other configurations are computed on demand.
impl CalibrationSource for Arc<DancoCalibration> {
    fn calibration(&self, config: &DancoConfig) -> Result<Arc<DancoCalibration>> {
        if &self.config == config {
            Ok(self.clone())
        } else {
            danco_calibrate(config).map(Arc::new)
        }
    }
}

/// Statistics of `data` for neighbourhood size `k`. `None` when no finite
/// statistics exist (e.g. all neighbour vectors vanish).
pub fn danco_statistics(data: &Dataset, k: usize) -> Result<Option<DancoStats>> {
    let n = data.n_obj();
    if k < 2 {
        return param_err("DANCo needs k >= 2");
    }
    if k + 1 >= n {
        return param_err(alloc::format!("DANCo needs more than {} points", k + 1));
    }
    let g = knn(data, k + 1)?;
    let log_rho: Vec<f64> = (0..n)
        .filter_map(|i| {
            let rho = g.dist(i, 1) / g.dist(i, k + 1);
            (rho > 0.0 && rho < 1.0).then(|| rho.ln())
        })
        .collect();
    if log_rho.is_empty() {
        return Ok(None);
    }
    let ml_dim = mind_ml_from_ratios(&log_rho, k, MIND_MAX_DIM, MindVersion::MLk);

    let dim = data.n_var();
    let (mut s, mut c, mut count) = (0.0, 0.0, 0usize);
    let mut vecs: Vec<f64> = Vec::with_capacity(k * dim);
    for i in 0..n {
        vecs.clear();
        let xi = data.row(i);
        let mut m = 0;
        for &j in &g.neighbors(i)[..k] {
            let xj = data.row(j);
            let norm = xi
                .iter()
                .zip(xj)
                .map(|(a, b)| (b - a) * (b - a))
                .sum::<f64>()
                .sqrt();
            if norm > 0.0 {
                vecs.extend(xi.iter().zip(xj).map(|(a, b)| (b - a) / norm));
                m += 1;
            }
        }
        for a in 0..m {
            for b in (a + 1)..m {
                let va = &vecs[a * dim..(a + 1) * dim];
                let vb = &vecs[b * dim..(b + 1) * dim];
                let cos: f64 = va.iter().zip(vb).map(|(x, y)| x * y).sum();
                let theta = cos.clamp(-1.0, 1.0).acos();
                s += theta.sin();
                c += theta.cos();
                count += 1;
            }
        }
    }
    if count == 0 {
        return Ok(None);
    }
    let (s, c) = (s / count as f64, c / count as f64);
    let stats = DancoStats {
        ml_dim,
        nu: s.atan2(c),
        tau: von_mises_kappa((s * s + c * c).sqrt()),
    };
    let finite = stats.ml_dim.is_finite() && stats.nu.is_finite() && stats.tau.is_finite();
    Ok(finite.then_some(stats))
}

/// Averaged statistics of `samples_per_dim` uniform samples from the unit
/// sphere `S^d` for every `d` in `1..=d_max`.
pub fn danco_calibrate(config: &DancoConfig) -> Result<DancoCalibration> {
    config.validate()?;
    let mut stats = Vec::with_capacity(config.d_max);
    for d in 1..=config.d_max {
        let dl = alloc::format!("{d}");
        let (mut ml, mut s, mut c, mut tau, mut used) = (0.0, 0.0, 0.0, 0.0, 0usize);
        for rep in 0..config.samples_per_dim {
            let rl = alloc::format!("{rep}");
            let sample = calibration_sample(
                d,
                config.n_cal,
                &mut rng::stream(config.seed, &["DANCo", &dl, &rl]),
            )?;
            if let Some(st) = danco_statistics(&sample, config.k)? {
                ml += st.ml_dim;
                s += st.nu.sin();
                c += st.nu.cos();
                tau += st.tau;
                used += 1;
            }
        }
        if used == 0 {
            return Err(crate::IdError::DegenerateData(alloc::format!(
                "calibration failed at d = {d}"
            )));
        }
        let u = used as f64;
        stats.push(DancoStats {
            ml_dim: ml / u,
            nu: s.atan2(c),
            tau: tau / u,
        });
    }
    Ok(DancoCalibration {
        config: config.clone(),
        stats,
    })
}

/// Uniform sample from the `d`-dimensional unit sphere `S^d` in `R^(d+1)`.
pub fn calibration_sample(d: usize, n: usize, r: &mut rng::Rng) -> Result<Dataset> {
    let mut values = alloc::vec![0.0; n * (d + 1)];
    for row in values.chunks_mut(d + 1) {
        sphere_point(r, d + 1, row);
    }
    Dataset::new(alloc::format!("sphere_d{d}"), n, d + 1, values)
}

/// `E[u^s]` for `u ~ Beta(1, k)`.
fn beta1k_moment(k: usize, s: f64) -> f64 {
    (1..=k).map(|j| j as f64 / (s + j as f64)).product()
}

/// Kullback–Leibler divergence between the densities of the normalized
/// nearest-neighbour distance `g(ρ) = k d ρ^(d-1) (1 - ρ^d)^(k-1)` for
/// dimensions `a` (reference) and `b`.
pub fn kl_norm(k: usize, a: f64, b: f64) -> f64 {
    let kf = k as f64;
    let r = b / a;
    // E[ln(1 - u^r)] = -Σ_m E[u^(r m)] / m
    let mut series = 0.0;
    for m in 1..=1_000_000usize {
        let t = beta1k_moment(k, r * m as f64) / m as f64;
        series += t;
        if t < 1e-15 * series && m as f64 * r > kf {
            break;
        }
    }
    (a / b).ln() - (a - b) * harmonic_number(k) / a + (kf - 1.0) * (-1.0 / kf + series)
}

/// Kullback–Leibler divergence `KL(VM(ν1, τ1) || VM(ν2, τ2))`.
pub fn kl_von_mises(nu1: f64, tau1: f64, nu2: f64, tau2: f64) -> f64 {
    ln_bessel_i0(tau2) - ln_bessel_i0(tau1) + bessel_ratio(tau1) * (tau1 - tau2 * (nu1 - nu2).cos())
}

/// DANCo: the candidate dimension whose calibration statistics are closest
/// to those of `data` in summed KL divergence.
pub fn danco_id(data: &Dataset, cal: &DancoCalibration) -> Result<IdEstimate> {
    let k = cal.config.k;
    let base = IdEstimate::new("DANCo", f64::NAN)
        .param("k", k)
        .param("d_max", cal.config.d_max)
        .param("n_cal", cal.config.n_cal);
    let Some(st) = danco_statistics(data, k)? else {
        return Ok(base.diag("reason", "no finite neighbour statistics"));
    };
    let d_top = data.n_var().min(cal.stats.len());
    let kl: Vec<f64> = cal.stats[..d_top]
        .iter()
        .map(|c| kl_norm(k, st.ml_dim, c.ml_dim) + kl_von_mises(st.nu, st.tau, c.nu, c.tau))
        .collect();
    let best = kl
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i + 1);
    let base = base
        .diag("ml_dim", st.ml_dim)
        .diag("nu", st.nu)
        .diag("tau", st.tau)
        .diag("kl", kl);
    Ok(match best {
        Some(d) => {
            let mut e = base;
            e.set_value(d as f64);
            e
        }
        None => base.diag("reason", "no finite divergence"),
    })
}
