use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::{NnParams, ScalingFit};
use crate::dataset::{sq_dist, Dataset};
use crate::error::{param_err, IdError, Result};
use crate::estimate::IdEstimate;
use crate::geometry::knn;
use crate::math::median;

/// Number of radii in the correlation-integral grid.
pub const CORR_INT_GRID: usize = 16;

/// `n` log-spaced radii from `lo` to `hi` inclusive.
pub fn log_radius_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == n {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// `C(r) = 2 / (M (M - 1)) · #{i < j : |x_i - x_j| < r}` for each radius.
///
/// Distances are compared as `sqrt(d²)`, the same value the kNN search
/// reports, so a radius taken from a neighbour distance classifies its own
/// pair consistently (squaring `r` instead would leave it to rounding).
pub fn correlation_integral(data: &Dataset, radii: &[f64]) -> Vec<f64> {
    let m = data.n_obj();
    let mut sorted: Vec<(f64, usize)> = radii
        .iter()
        .copied()
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut hist = vec![0u64; radii.len() + 1];
    for i in 0..m {
        let xi = data.row(i);
        for j in (i + 1)..m {
            let d = sq_dist(xi, data.row(j)).sqrt();
            let pos = sorted.partition_point(|s| s.0 <= d);
            hist[pos] += 1;
        }
    }
    let mut counts_sorted = vec![0u64; radii.len()];
    let mut acc = 0;
    for (p, c) in counts_sorted.iter_mut().enumerate() {
        acc += hist[p];
        *c = acc;
    }
    let pairs = (m as f64) * (m as f64 - 1.0) / 2.0;
    let mut out = vec![0.0; radii.len()];
    for (p, &(_, orig)) in sorted.iter().enumerate() {
        out[orig] = counts_sorted[p] as f64 / pairs;
    }
    out
}

/// Correlation dimension: slope of `log C(r)` against `log r` between the
/// median `k1`-th and median `k2`-th neighbour distances.
pub fn corr_int(data: &Dataset, params: &NnParams) -> Result<IdEstimate> {
    let n = data.n_obj();
    if n < (params.k2 + 1).max(3) {
        return param_err(alloc::format!(
            "CorrInt needs at least {} points",
            (params.k2 + 1).max(3)
        ));
    }
    params.check_k1_k2(n)?;
    let first = data.row(0);
    if data.rows().all(|r| r == first) {
        return Err(IdError::DegenerateData("all points are identical".into()));
    }
    let g = knn(data, params.k2)?;
    let d1: Vec<f64> = (0..n).map(|i| g.dist(i, params.k1)).collect();
    let d2: Vec<f64> = (0..n).map(|i| g.dist(i, params.k2)).collect();
    let (r1, r2) = (median(&d1), median(&d2));
    let base = IdEstimate::new("CorrInt", f64::NAN)
        .param("k1", params.k1)
        .param("k2", params.k2);
    if !(r1 > 0.0) || !(r2 > r1) {
        return Ok(base
            .diag("reason", "empty radius range")
            .diag("r1", r1)
            .diag("r2_radius", r2));
    }
    let radii = log_radius_grid(r1, r2, CORR_INT_GRID);
    let c = correlation_integral(data, &radii);
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .zip(&c)
        .filter(|(_, &cv)| cv > 0.0 && cv < 1.0)
        .map(|(r, cv)| (r.ln(), cv.ln()))
        .collect();
    match ScalingFit::fit(pts) {
        Some(fit) => {
            let mut e = base
                .diag("slope", fit.slope)
                .diag("r2", fit.r2)
                .diag("r1", r1)
                .diag("r2_radius", r2);
            e.set_value(fit.slope);
            Ok(e)
        }
        None => Ok(base.diag("reason", "fewer than two grid points with 0 < C(r) < 1")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints() {
        let g = log_radius_grid(0.5, 2.0, 5);
        assert_eq!(g[0], 0.5);
        assert_eq!(g[4], 2.0);
        assert!((g[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn forced_quadratic_scaling_gives_slope_two() {
        let radii = log_radius_grid(0.1, 0.9, CORR_INT_GRID);
        let pts = radii.iter().map(|r| (r.ln(), (r * r).ln())).collect();
        let fit = ScalingFit::fit(pts).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn integral_counts_strictly_below_radius() {
        let d = Dataset::from_rows("x", &[[0.0], [1.0], [3.0]]).unwrap();
        // Pair distances 1, 2, 3.
        let c = correlation_integral(&d, &[1.0, 1.5, 3.0, 3.5]);
        assert_eq!(c, [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]);
    }

    #[test]
    fn identical_points_are_degenerate() {
        let rows = alloc::vec![[1.0, 1.0]; 30];
        let d = Dataset::from_rows("x", &rows).unwrap();
        assert!(matches!(
            corr_int(&d, &NnParams::default()),
            Err(IdError::DegenerateData(_))
        ));
    }
}
