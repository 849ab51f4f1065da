//! Nearest-neighbour and fractal estimators.

use alloc::vec::Vec;

use serde::Serialize;

use crate::error::{param_err, Result};
use crate::math::linear_fit;

mod corr_int;
mod knn_graph;
mod mada;
mod mind;
mod mle;
mod mom;
mod tle;
mod twonn;

pub use corr_int::{corr_int, correlation_integral, log_radius_grid, CORR_INT_GRID};
pub use knn_graph::{default_sizes, knn_graph_id, knn_graph_length, KnnGraphParams};
pub use mada::{mada_id, mada_pointwise};
pub use mind::{
    mind_log_likelihood, mind_log_likelihood_slope, mind_ml_from_ratios, mind_ml_id, MindVersion,
    MIND_MAX_DIM,
};
pub use mle::{mle_id, mle_inverse_pointwise};
pub use mom::{mom_id, mom_pointwise};
pub use tle::{tle_id, tle_pointwise, TLE_EPSILON};
pub use twonn::{twonn_from_ratios, twonn_id, DEFAULT_DISCARD_FRACTION};

/// How pointwise estimates are pooled into one global value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Aggregation {
    /// Arithmetic mean of the pointwise estimates.
    Mean,
    /// Reciprocal of the mean of reciprocals.
    InverseMean,
}

/// Neighbourhood sizes shared by the k-NN estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NnParams {
    pub k: usize,
    pub k1: usize,
    pub k2: usize,
    pub aggregation: Aggregation,
}

impl Default for NnParams {
    fn default() -> Self {
        NnParams {
            k: 20,
            k1: 10,
            k2: 20,
            aggregation: Aggregation::InverseMean,
        }
    }
}

impl NnParams {
    pub(crate) fn check_k1_k2(&self, n_obj: usize) -> Result<()> {
        if self.k1 < 1 || self.k1 > self.k2 {
            return param_err(alloc::format!(
                "need 1 <= k1 <= k2, got k1={} k2={}",
                self.k1,
                self.k2
            ));
        }
        if self.k2 >= n_obj {
            return param_err(alloc::format!(
                "k2 = {} must be smaller than the number of points {}",
                self.k2,
                n_obj
            ));
        }
        Ok(())
    }

    pub(crate) fn check_k(&self, n_obj: usize, min_k: usize) -> Result<()> {
        if self.k < min_k {
            return param_err(alloc::format!("k = {} must be at least {}", self.k, min_k));
        }
        if self.k >= n_obj {
            return param_err(alloc::format!(
                "k = {} must be smaller than the number of points {}",
                self.k,
                n_obj
            ));
        }
        Ok(())
    }
}

/// Least-squares fit in log-log space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: Vec<(f64, f64)>,
}

impl ScalingFit {
    /// Fits `y = slope * x + intercept` through already-logged points.
    pub fn fit(points: Vec<(f64, f64)>) -> Option<ScalingFit> {
        if points.len() < 2 {
            return None;
        }
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        let (slope, intercept, r2) = linear_fit(&xs, &ys)?;
        Some(ScalingFit {
            slope,
            intercept,
            r2,
            points,
        })
    }
}

/// Share of skipped points above which an estimate is declared invalid.
pub(crate) const MAX_SKIP_FRACTION: f64 = 0.5;
