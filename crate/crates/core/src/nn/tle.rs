use alloc::vec::Vec;

use num_traits::Float;

use super::{NnParams, MAX_SKIP_FRACTION};
use crate::dataset::{sq_dist, Dataset};
use crate::error::Result;
use crate::estimate::IdEstimate;
use crate::geometry::knn;
use crate::math::mean;

/// Measurements below this fraction of the locality radius are dropped.
pub const TLE_EPSILON: f64 = 1e-4;

/// Distance of the tight-locality measurement for neighbour `v` seen from
/// `w`: `u` is the distance of `v` to the centre, `uw` that of `w`, `q2` the
/// squared distance from `w` to `v` (or to the reflection of `v`).
fn measurement(r: f64, u: f64, uw: f64, q2: f64) -> f64 {
    if u == 0.0 {
        return uw;
    }
    if uw == 0.0 {
        let q = q2.sqrt();
        return r * q / (r + q);
    }
    let a = u * u + q2 - uw * uw;
    let h = r * r - u * u;
    if h <= 0.0 {
        return r * q2 / (r * r + q2 - uw * uw);
    }
    r * ((a * a + 4.0 * q2 * h).sqrt() - a) / (2.0 * h)
}

/// Pointwise tight-locality estimate for one neighbourhood.
///
/// `u` holds the distances of the `k` neighbours to the centre (ascending,
/// `u[k-1] = r`) and `pair2` their squared pairwise distances (`k x k`,
/// row-major). Every ordered pair of distinct neighbours contributes the
/// log-ratio of its direct and reflected measurements to `r`; every
/// neighbour contributes `ln(u_i / r)` twice. The estimate is the negative
/// reciprocal of the mean term.
pub fn tle_pointwise(u: &[f64], pair2: &[f64]) -> Option<f64> {
    let k = u.len();
    let r = *u.last()?;
    if !(r > 0.0) {
        return None;
    }
    let eps = TLE_EPSILON * r;
    let mut sum = 0.0;
    let mut terms = 0usize;
    for a in 0..k {
        for b in 0..k {
            if a == b {
                continue;
            }
            let v2 = pair2[a * k + b];
            if v2 == 0.0 {
                continue;
            }
            // b plays v (the one being extrapolated), a plays w.
            let z2 = (2.0 * u[b] * u[b] + 2.0 * u[a] * u[a] - v2).max(0.0);
            let s = measurement(r, u[b], u[a], v2);
            let t = measurement(r, u[b], u[a], z2);
            if !(s >= eps) || !(t >= eps) {
                continue;
            }
            sum += (s / r).ln() + (t / r).ln();
            terms += 2;
        }
    }
    for &ui in u {
        if ui < eps {
            continue;
        }
        sum += 2.0 * (ui / r).ln();
        terms += 2;
    }
    tle_combine(sum, terms)
}

fn tle_combine(sum: f64, terms: usize) -> Option<f64> {
    if terms == 0 || !(sum < 0.0) {
        return None;
    }
    let id = -(terms as f64) / sum;
    (id.is_finite() && id > 0.0).then_some(id)
}

/// Estimation within tight localities, pooled by arithmetic mean.
pub fn tle_id(data: &Dataset, params: &NnParams) -> Result<IdEstimate> {
    let n = data.n_obj();
    params.check_k(n, 3)?;
    let k = params.k;
    let g = knn(data, k)?;
    let mut vals = Vec::with_capacity(n);
    let mut pair2 = alloc::vec![0.0; k * k];
    for i in 0..n {
        let nb = g.neighbors(i);
        for a in 0..k {
            pair2[a * k + a] = 0.0;
            for b in (a + 1)..k {
                let d2 = sq_dist(data.row(nb[a]), data.row(nb[b]));
                pair2[a * k + b] = d2;
                pair2[b * k + a] = d2;
            }
        }
        if let Some(v) = tle_pointwise(g.distances(i), &pair2) {
            vals.push(v);
        }
    }
    let skipped = n - vals.len();
    let base = IdEstimate::new("TLE", f64::NAN)
        .param("k", k)
        .diag("n_skipped", skipped)
        .diag("skip_rate", skipped as f64 / n as f64);
    if skipped as f64 > MAX_SKIP_FRACTION * n as f64 || vals.is_empty() {
        return Ok(base.diag("reason", "more than half of the localities are degenerate"));
    }
    let mut e = base;
    e.set_value(mean(&vals));
    Ok(e)
}
