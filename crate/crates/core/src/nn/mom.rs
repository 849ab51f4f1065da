use alloc::vec::Vec;

use super::NnParams;
use crate::dataset::Dataset;
use crate::error::Result;
use crate::estimate::IdEstimate;
use crate::geometry::knn;
use crate::math::mean;

/// Method-of-moments pointwise estimate `m1 / (w - m1)` where `w` is the
/// largest and `m1` the mean of the given neighbour distances.
pub fn mom_pointwise(dists: &[f64]) -> Option<f64> {
    let w = *dists.last()?;
    let m1 = mean(dists);
    let denom = w - m1;
    if !(denom > 0.0) {
        return None;
    }
    Some(m1 / denom)
}

pub fn mom_id(data: &Dataset, params: &NnParams) -> Result<IdEstimate> {
    let n = data.n_obj();
    params.check_k(n, 1)?;
    let g = knn(data, params.k)?;
    let vals: Vec<f64> = (0..n)
        .filter_map(|i| mom_pointwise(g.distances(i)))
        .collect();
    let skipped = n - vals.len();
    let base = IdEstimate::new("MOM", f64::NAN)
        .param("k", params.k)
        .diag("n_skipped", skipped);
    if vals.is_empty() {
        return Ok(base.diag("reason", "every point has equal neighbour distances"));
    }
    let mut e = base;
    e.set_value(mean(&vals));
    Ok(e)
}
