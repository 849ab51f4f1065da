//! Small numeric helpers shared by the estimators.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::Float;

pub fn lgamma(x: f64) -> f64 {
    libm::lgamma(x)
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation.
pub fn std_pop(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Median of a list; average of the two middle values for even lengths.
pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v: Vec<f64> = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn harmonic_number(k: usize) -> f64 {
    (1..=k).map(|j| 1.0 / j as f64).sum()
}

/// Ordinary least squares `y = slope * x + intercept`.
///
/// Returns `(slope, intercept, r2)`; `None` when fewer than two points or all
/// abscissae coincide. `r2` is 1 when the ordinates are constant.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64, f64)> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = mean(xs);
    let my = mean(ys);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let r2 = if syy <= 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Some((slope, intercept, r2))
}

/// Root of an increasing function on `[lo, hi]` by bisection, assuming
/// `f(lo) <= 0 <= f(hi)`.
pub fn bisect_increasing<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if b - a <= tol * (1.0 + m.abs()) {
            return m;
        }
        if f(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Modified Bessel functions scaled by `exp(-x)`: `(I0(x) e^-x, I1(x) e^-x)`
/// for `x >= 0`.
fn bessel_i01_scaled(x: f64) -> (f64, f64) {
    if x <= 20.0 {
        let q = x * x / 4.0;
        let mut t0 = 1.0;
        let mut t1 = x / 2.0;
        let mut s0 = t0;
        let mut s1 = t1;
        let mut m = 1.0;
        while m < 500.0 {
            t0 *= q / (m * m);
            t1 *= q / (m * (m + 1.0));
            s0 += t0;
            s1 += t1;
            if t0 < 1e-17 * s0 && t1 < 1e-17 * s1.max(f64::MIN_POSITIVE) {
                break;
            }
            m += 1.0;
        }
        let e = (-x).exp();
        (s0 * e, s1 * e)
    } else {
        // Hankel asymptotic expansion.
        let pre = 1.0 / (2.0 * core::f64::consts::PI * x).sqrt();
        let mut s0 = 1.0;
        let mut s1 = 1.0;
        let mut t0 = 1.0;
        let mut t1 = 1.0;
        for k in 1..12 {
            let kf = k as f64;
            let odd = (2.0 * kf - 1.0) * (2.0 * kf - 1.0);
            t0 *= odd / (kf * 8.0 * x);
            t1 *= (odd - 4.0) / (kf * 8.0 * x);
            s0 += t0;
            s1 += t1;
        }
        (pre * s0, pre * s1)
    }
}

/// `ln I0(x)` for `x >= 0`.
pub fn ln_bessel_i0(x: f64) -> f64 {
    let (i0s, _) = bessel_i01_scaled(x);
    i0s.ln() + x
}

/// Mean resultant length of a von Mises distribution, `A(x) = I1(x) / I0(x)`.
pub fn bessel_ratio(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let (i0s, i1s) = bessel_i01_scaled(x);
    i1s / i0s
}

/// Inverse of [`bessel_ratio`]: the von Mises concentration whose mean
/// resultant length is `r`. Best–Fisher starting point, Newton refinement.
pub fn von_mises_kappa(r: f64) -> f64 {
    let r = r.clamp(0.0, 1.0 - 1e-12);
    if r == 0.0 {
        return 0.0;
    }
    let mut k = if r < 0.53 {
        2.0 * r + r * r * r + 5.0 * r.powi(5) / 6.0
    } else if r < 0.85 {
        -0.4 + 1.39 * r + 0.43 / (1.0 - r)
    } else {
        1.0 / (r * r * r - 4.0 * r * r + 3.0 * r)
    };
    for _ in 0..20 {
        let a = bessel_ratio(k);
        // A'(k) = 1 - A/k - A^2
        let da = 1.0 - a / k - a * a;
        if !(da > 0.0) {
            break;
        }
        let step = (a - r) / da;
        let next = (k - step).max(k / 10.0);
        if (next - k).abs() <= 1e-12 * k {
            k = next;
            break;
        }
        k = next;
    }
    k
}

/// Circular mean of angles.
pub fn circular_mean(angles: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0, 0.0);
    for a in angles {
        s += a.sin();
        c += a.cos();
    }
    s.atan2(c)
}
