use alloc::vec::Vec;

use num_traits::Float;

use crate::dataset::Dataset;
use crate::error::{param_err, Result};
use crate::estimate::IdEstimate;
use crate::geometry::knn;

pub const DEFAULT_DISCARD_FRACTION: f64 = 0.1;

/// TwoNN from the ratios `μ = T_2 / T_1`.
///
/// The ratios are sorted, the largest `discard_fraction` dropped, and the
/// slope of the regression through the origin of `-ln(1 - F)` on `ln μ` is
/// returned, with `F = rank / (n + 1)`. The closed-form maximum likelihood
/// value `n / Σ ln μ` over the kept ratios goes to the diagnostics.
pub fn twonn_from_ratios(mut mu: Vec<f64>, discard_fraction: f64) -> IdEstimate {
    mu.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = mu.len();
    let keep = ((n as f64) * (1.0 - discard_fraction)).floor() as usize;
    let kept = &mu[..keep.min(n)];
    let (mut sxy, mut sxx, mut slog) = (0.0, 0.0, 0.0);
    for (i, m) in kept.iter().enumerate() {
        let x = m.ln();
        let f = (i + 1) as f64 / (n + 1) as f64;
        let y = -(1.0 - f).ln();
        sxy += x * y;
        sxx += x * x;
        slog += x;
    }
    let base = IdEstimate::new("TwoNN", f64::NAN)
        .param("discard_fraction", discard_fraction)
        .diag("n_used", kept.len());
    if !(sxx > 0.0) {
        return base.diag("reason", "all neighbour ratios equal one");
    }
    let mut e = base.diag("mle", kept.len() as f64 / slog);
    e.set_value(sxy / sxx);
    e
}

pub fn twonn_id(data: &Dataset, discard_fraction: f64) -> Result<IdEstimate> {
    if !(0.0..1.0).contains(&discard_fraction) {
        return param_err("discard_fraction must lie in [0, 1)");
    }
    let n = data.n_obj();
    if n < 10 {
        return param_err("TwoNN needs at least 10 points");
    }
    let g = knn(data, 2)?;
    let mu: Vec<f64> = (0..n)
        .filter(|&i| g.dist(i, 1) > 0.0)
        .map(|i| g.dist(i, 2) / g.dist(i, 1))
        .collect();
    let skipped = n - mu.len();
    Ok(twonn_from_ratios(mu, discard_fraction).diag("n_skipped", skipped))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_log_ratios_give_mle_one() {
        let e = twonn_from_ratios(alloc::vec![1.0f64.exp(); 50], 0.0);
        assert!((e.diagnostics["mle"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_ratios_one_is_invalid() {
        let e = twonn_from_ratios(alloc::vec![1.0; 50], 0.1);
        assert!(!e.valid);
    }

    #[test]
    fn exact_pareto_quantiles_recover_dimension() {
        // μ quantiles of a Pareto(d) law at F = i / (n + 1).
        let d = 3.0;
        let n = 1000;
        let mu = (1..=n)
            .map(|i| (1.0 - i as f64 / (n + 1) as f64).powf(-1.0 / d))
            .collect();
        let e = twonn_from_ratios(mu, 0.1);
        assert!((e.value - d).abs() < 1e-9);
    }

    #[test]
    fn needs_ten_points() {
        let d = Dataset::from_rows("x", &[[0.0], [1.0], [3.0]]).unwrap();
        assert!(twonn_id(&d, 0.1).is_err());
    }
}
