//! PCA-spectrum selection rules ("linear" ID estimators).
//!
//! With `p_i = λ_i / Σλ` and `d` the spectrum length:
//!
//! | rule | output |
//! |------|--------|
//! | Fukunaga–Olsen | number of `λ_i >= α·λ_1` |
//! | Fan | smallest `k` with `λ_k/λ_{k+1} > α` and `Σ_{i<=k} p_i >= β`, else ratio |
//! | maxgap | `argmax λ_i/λ_{i+1}`; a zero successor counts as an infinite gap |
//! | ratio | smallest `k` with `Σ_{i<=k} p_i >= 1 - α` |
//! | participation ratio | `(Σλ)² / Σλ²`, real valued |
//! | Kaiser | number of `λ_i` above the mean eigenvalue |
//! | broken stick | leading run of `p_i > (1/d) Σ_{j>=i} 1/j` |
//!
//! Integer rules never return less than 1.

use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{param_err, IdError, Result};
use crate::estimate::IdEstimate;
use crate::geometry::{covariance_spectrum, Spectrum};

pub const DEFAULT_ALPHA_FO: f64 = 0.05;
pub const DEFAULT_ALPHA_RATIO: f64 = 0.05;
pub const DEFAULT_ALPHA_FAN: f64 = 10.0;
pub const DEFAULT_BETA_FAN: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "tag")]
pub enum LpcaVariant {
    FukunagaOlsen { alpha: f64 },
    Fan { alpha: f64, beta: f64 },
    MaxGap,
    Ratio { alpha: f64 },
    ParticipationRatio,
    Kaiser,
    BrokenStick,
}

impl LpcaVariant {
    pub fn fukunaga_olsen() -> Self {
        LpcaVariant::FukunagaOlsen {
            alpha: DEFAULT_ALPHA_FO,
        }
    }
    pub fn fan() -> Self {
        LpcaVariant::Fan {
            alpha: DEFAULT_ALPHA_FAN,
            beta: DEFAULT_BETA_FAN,
        }
    }
    pub fn ratio() -> Self {
        LpcaVariant::Ratio {
            alpha: DEFAULT_ALPHA_RATIO,
        }
    }

    pub fn method_id(&self) -> &'static str {
        match self {
            LpcaVariant::FukunagaOlsen { .. } => "lpca_FO",
            LpcaVariant::Fan { .. } => "lpca_Fan",
            LpcaVariant::MaxGap => "lpca_maxgap",
            LpcaVariant::Ratio { .. } => "lpca_ratio",
            LpcaVariant::ParticipationRatio => "lpca_PR",
            LpcaVariant::Kaiser => "lpca_Kaiser",
            LpcaVariant::BrokenStick => "lpca_BS",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            LpcaVariant::FukunagaOlsen { alpha } | LpcaVariant::Ratio { alpha } => {
                if !(alpha > 0.0 && alpha < 1.0) {
                    return param_err(alloc::format!(
                        "{}: alpha must lie in (0, 1)",
                        self.method_id()
                    ));
                }
            }
            LpcaVariant::Fan { alpha, beta } if !(alpha > 1.0) || !(beta > 0.0 && beta < 1.0) => {
                return param_err("lpca_Fan: need alpha > 1 and beta in (0, 1)");
            }
            _ => {}
        }
        Ok(())
    }
}

fn ratio_rule(p: &[f64], alpha: f64) -> usize {
    let target = 1.0 - alpha;
    let mut cum = 0.0;
    for (i, pi) in p.iter().enumerate() {
        cum += pi;
        if cum >= target {
            return i + 1;
        }
    }
    p.len()
}

/// Applies a selection rule to a spectrum.
pub fn lpca_select(spectrum: &Spectrum, variant: LpcaVariant) -> Result<IdEstimate> {
    variant.validate()?;
    let lam = spectrum.eigenvalues();
    if lam.is_empty() {
        return param_err("empty spectrum");
    }
    let total = spectrum.total();
    if !(total > 0.0) {
        return Err(IdError::DegenerateSpectrum);
    }
    let d = lam.len();
    let p: alloc::vec::Vec<f64> = lam.iter().map(|l| l / total).collect();
    let id = variant.method_id();
    let est = match variant {
        LpcaVariant::FukunagaOlsen { alpha } => {
            let n = lam.iter().filter(|&&l| l >= alpha * lam[0]).count();
            IdEstimate::new(id, n.max(1) as f64).param("alpha", alpha)
        }
        LpcaVariant::Ratio { alpha } => {
            IdEstimate::new(id, ratio_rule(&p, alpha) as f64).param("alpha", alpha)
        }
        LpcaVariant::MaxGap => {
            let rank = spectrum.rank();
            let n = if rank < d {
                rank
            } else {
                let mut best = 1;
                let mut best_gap = f64::NEG_INFINITY;
                for i in 0..d.saturating_sub(1) {
                    let g = lam[i] / lam[i + 1];
                    if g > best_gap {
                        best_gap = g;
                        best = i + 1;
                    }
                }
                best
            };
            IdEstimate::new(id, n.max(1) as f64)
        }
        LpcaVariant::Kaiser => {
            let m = total / d as f64;
            let n = lam.iter().filter(|&&l| l > m).count();
            IdEstimate::new(id, n.max(1) as f64)
        }
        LpcaVariant::ParticipationRatio => {
            let s2: f64 = lam.iter().map(|l| l * l).sum();
            IdEstimate::new(id, total * total / s2)
        }
        LpcaVariant::BrokenStick => {
            let mut stick = alloc::vec![0.0; d];
            let mut acc = 0.0;
            for i in (0..d).rev() {
                acc += 1.0 / (i + 1) as f64;
                stick[i] = acc / d as f64;
            }
            let n = p.iter().zip(&stick).take_while(|(pi, bi)| pi > bi).count();
            IdEstimate::new(id, n.max(1) as f64)
        }
        LpcaVariant::Fan { alpha, beta } => {
            let mut cum = 0.0;
            let mut found = None;
            for k in 0..d.saturating_sub(1) {
                cum += p[k];
                let gap = if lam[k + 1] > 0.0 {
                    lam[k] / lam[k + 1]
                } else {
                    f64::INFINITY
                };
                if lam[k] > 0.0 && gap > alpha && cum >= beta {
                    found = Some(k + 1);
                    break;
                }
            }
            let e = match found {
                Some(n) => IdEstimate::new(id, n as f64).diag("fallback_ratio", false),
                None => IdEstimate::new(id, ratio_rule(&p, DEFAULT_ALPHA_RATIO) as f64)
                    .diag("fallback_ratio", true),
            };
            e.param("alpha", alpha).param("beta", beta)
        }
    };
    Ok(est.diag("spectrum_len", d))
}

/// Covariance spectrum of the data followed by the selection rule.
pub fn lpca_estimate(data: &Dataset, variant: LpcaVariant) -> Result<IdEstimate> {
    let s = covariance_spectrum(data)?;
    lpca_select(&s, variant)
}
