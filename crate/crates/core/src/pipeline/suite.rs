use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::RngCore;
use serde::Serialize;

use super::preprocess::{preprocess, subsample_rows, Cap, PreprocessConfig};
use crate::concentration::CalibrationSource;
use crate::dataset::Dataset;
use crate::error::{param_err, Result};
use crate::estimate::IdEstimate;
use crate::geometry::pca_project;
use crate::methods::{estimate_with, EstimatorParams, Method};
use crate::rng;

/// Source of wall-clock readings in seconds.
pub trait Clock {
    fn now(&self) -> f64;
}

/// Always reads zero; used where timing is not wanted.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub preprocess: PreprocessConfig,
    /// Apply [`preprocess`] to every dataset first.
    pub normalize: bool,
    pub params: EstimatorParams,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            preprocess: PreprocessConfig::default(),
            normalize: true,
            params: EstimatorParams::default(),
            seed: 0,
        }
    }
}

/// One (dataset, method) result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub estimate: IdEstimate,
    pub seconds: f64,
    /// Shape the method actually saw after its caps.
    pub n_obj: usize,
    pub n_var: usize,
}

impl Cell {
    fn failed(method: Method, reason: String) -> Self {
        Cell {
            estimate: IdEstimate::invalid(method.id(), reason),
            seconds: 0.0,
            n_obj: 0,
            n_var: 0,
        }
    }
}

/// Seed of the named sub-stream for `(dataset, method)`.
pub fn cell_seed(seed: u64, dataset: &str, method: Method) -> u64 {
    rng::stream(seed, &[dataset, method.id()]).next_u64()
}

/// Row and column limits of `method`, if any.
pub fn method_cap(method: Method, config: &PreprocessConfig) -> Option<Cap> {
    match method {
        Method::Knn | Method::Mada => Some(Cap {
            rows: config.max_rows_knn_mada,
            cols: usize::MAX,
        }),
        Method::Danco => Some(config.danco_cap),
        Method::Ess => Some(config.ess_cap),
        _ => None,
    }
}

/// Row subsample, then PCA column reduction.
pub fn apply_cap(
    data: &Dataset,
    method: Method,
    config: &PreprocessConfig,
    seed: u64,
) -> Result<Dataset> {
    let Some(cap) = method_cap(method, config) else {
        return Ok(data.clone());
    };
    let mut r = rng::stream(seed, &[data.name(), method.id(), "cap"]);
    let rows = subsample_rows(data, cap.rows, &mut r)?;
    if rows.n_var() > cap.cols {
        pca_project(&rows, cap.cols)
    } else {
        Ok(rows)
    }
}

/// The dataset as every method of the suite sees it before its own caps.
pub fn prepare_dataset(data: &Dataset, config: &SuiteConfig) -> Result<Dataset> {
    if config.normalize {
        let cfg = PreprocessConfig {
            seed: config.seed,
            ..config.preprocess.clone()
        };
        preprocess(data, &cfg)
    } else {
        Ok(data.clone())
    }
}

/// Runs one method on a prepared dataset. Errors become invalid cells.
pub fn run_cell(
    data: &Dataset,
    method: Method,
    config: &SuiteConfig,
    calibration: &dyn CalibrationSource,
    clock: &dyn Clock,
) -> Cell {
    let t0 = clock.now();
    let result = apply_cap(data, method, &config.preprocess, config.seed).and_then(|d| {
        let seed = cell_seed(config.seed, data.name(), method);
        estimate_with(&d, method, &config.params, seed, calibration)
            .map(|e| (e, d.n_obj(), d.n_var()))
    });
    let seconds = clock.now() - t0;
    match result {
        Ok((estimate, n_obj, n_var)) => Cell {
            estimate,
            seconds,
            n_obj,
            n_var,
        },
        Err(e) => Cell {
            seconds,
            ..Cell::failed(method, e.to_string())
        },
    }
}

/// Datasets × methods results and the analyses derived from them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub datasets: Vec<String>,
    pub methods: Vec<String>,
    /// `cells[i][j]` holds dataset `i`, method `j`.
    pub cells: Vec<Vec<Cell>>,
    /// Estimated IDs, `NaN` where invalid.
    pub id_matrix: Vec<Vec<f64>>,
    pub valid: Vec<Vec<bool>>,
    pub validity_rates: Vec<f64>,
    pub consensus: Option<super::Consensus>,
    pub correlation: Option<super::Correlation>,
    pub warnings: Vec<String>,
}

impl BenchmarkReport {
    /// Builds the matrices from computed cells.
    pub fn from_cells(datasets: Vec<String>, methods: &[Method], cells: Vec<Vec<Cell>>) -> Self {
        let id_matrix: Vec<Vec<f64>> = cells
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| {
                        if c.estimate.valid {
                            c.estimate.value
                        } else {
                            f64::NAN
                        }
                    })
                    .collect()
            })
            .collect();
        let valid: Vec<Vec<bool>> = cells
            .iter()
            .map(|row| row.iter().map(|c| c.estimate.valid).collect())
            .collect();
        let validity_rates = (0..methods.len())
            .map(|j| valid.iter().filter(|r| r[j]).count() as f64 / valid.len().max(1) as f64)
            .collect();
        BenchmarkReport {
            datasets,
            methods: methods.iter().map(|m| String::from(m.id())).collect(),
            cells,
            id_matrix,
            valid,
            validity_rates,
            consensus: None,
            correlation: None,
            warnings: Vec::new(),
        }
    }

    pub fn seconds(&self) -> Vec<Vec<f64>> {
        self.cells
            .iter()
            .map(|r| r.iter().map(|c| c.seconds).collect())
            .collect()
    }
}

/// Runs every method on every dataset, sequentially. A dataset that fails
/// preprocessing yields a row of invalid cells.
pub fn run_suite(
    datasets: &[Dataset],
    methods: &[Method],
    config: &SuiteConfig,
    calibration: &dyn CalibrationSource,
    clock: &dyn Clock,
) -> Result<BenchmarkReport> {
    if datasets.is_empty() {
        return param_err("no datasets");
    }
    if methods.is_empty() {
        return param_err("no methods");
    }
    config.preprocess.validate()?;
    let cells = datasets
        .iter()
        .map(|d| match prepare_dataset(d, config) {
            Ok(p) => methods
                .iter()
                .map(|&m| run_cell(&p, m, config, calibration, clock))
                .collect(),
            Err(e) => failed_row(methods, &e.to_string()),
        })
        .collect();
    let names = datasets.iter().map(|d| d.name().to_string()).collect();
    Ok(BenchmarkReport::from_cells(names, methods, cells))
}

/// Row of invalid cells for a dataset that could not be prepared.
pub fn failed_row(methods: &[Method], reason: &str) -> Vec<Cell> {
    methods
        .iter()
        .map(|&m| Cell::failed(m, alloc::format!("preprocessing: {reason}")))
        .collect()
}
