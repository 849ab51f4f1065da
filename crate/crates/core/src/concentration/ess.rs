use alloc::vec::Vec;

use num_traits::Float;

use crate::dataset::Dataset;
use crate::error::{param_err, Result};
use crate::estimate::IdEstimate;
use crate::geometry::knn;
use crate::math::{bisect_increasing, lgamma, mean};

/// Expected `|sin|` of the angle between two independent uniform directions
/// in `R^d`: `Γ(d/2)² / (Γ((d+1)/2) Γ((d-1)/2))`, with `s(1) = 0`.
/// Increasing in `d`, tending to 1.
pub fn ess_theoretical(d: f64) -> f64 {
    if d <= 1.0 {
        return 0.0;
    }
    (2.0 * lgamma(d / 2.0) - lgamma((d + 1.0) / 2.0) - lgamma((d - 1.0) / 2.0)).exp()
}

/// Solves `s(d) = s_hat` on `[1, d_max]`. The flag is set when `s_hat`
/// falls outside the attainable range and the result is clamped.
pub fn ess_invert(s_hat: f64, d_max: f64) -> (f64, bool) {
    if s_hat <= 0.0 {
        return (1.0, s_hat < 0.0);
    }
    if s_hat >= ess_theoretical(d_max) {
        return (d_max, true);
    }
    (
        bisect_increasing(|d| ess_theoretical(d) - s_hat, 1.0, d_max, 1e-12),
        false,
    )
}

/// Expected-simplex-skewness estimate: per neighbourhood (the point and its
/// `k` nearest neighbours, centred at their centroid) the mean `|sin|` over
/// pairs of centred vectors is inverted through [`ess_theoretical`]; the
/// global value is the mean over neighbourhoods.
pub fn ess_id(data: &Dataset, k: usize, d_max: usize) -> Result<IdEstimate> {
    let n = data.n_obj();
    if k < 2 {
        return param_err("ESS needs k >= 2");
    }
    if k >= n {
        return param_err(alloc::format!("ESS needs more than {k} points"));
    }
    if d_max < 1 {
        return param_err("ESS needs d_max >= 1");
    }
    let g = knn(data, k)?;
    let dim = data.n_var();
    let mut locals = Vec::with_capacity(n);
    let mut clamped = 0usize;
    let mut vecs: Vec<Vec<f64>> = Vec::with_capacity(k + 1);
    for i in 0..n {
        let members: Vec<usize> = core::iter::once(i)
            .chain(g.neighbors(i).iter().copied())
            .collect();
        let mut centroid = alloc::vec![0.0; dim];
        for &m in &members {
            centroid
                .iter_mut()
                .zip(data.row(m))
                .for_each(|(c, x)| *c += x);
        }
        centroid.iter_mut().for_each(|c| *c /= members.len() as f64);
        vecs.clear();
        for &m in &members {
            let v: Vec<f64> = data
                .row(m)
                .iter()
                .zip(&centroid)
                .map(|(x, c)| x - c)
                .collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                vecs.push(v.into_iter().map(|x| x / norm).collect());
            }
        }
        let mut s = 0.0;
        let mut pairs = 0usize;
        for a in 0..vecs.len() {
            for b in (a + 1)..vecs.len() {
                let c: f64 = vecs[a].iter().zip(&vecs[b]).map(|(x, y)| x * y).sum();
                s += (1.0 - c * c).max(0.0).sqrt();
                pairs += 1;
            }
        }
        if pairs == 0 {
            continue;
        }
        let (d, cl) = ess_invert(s / pairs as f64, d_max as f64);
        clamped += cl as usize;
        locals.push(d);
    }
    let base = IdEstimate::new("ESS", f64::NAN)
        .param("k", k)
        .param("d_max", d_max);
    if locals.is_empty() {
        return Ok(base.diag("reason", "no neighbourhood has two distinct directions"));
    }
    let mut e = base
        .diag("n_neighbourhoods", locals.len())
        .diag("clamped", clamped)
        .diag("skip_rate", (n - locals.len()) as f64 / n as f64);
    e.set_value(mean(&locals));
    Ok(e)
}
