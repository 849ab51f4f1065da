//! Parallel suite execution and the analyses run after it.

use std::collections::BTreeMap;
use std::time::Instant;

use idim_core::concentration::CalibrationSource;
use idim_core::pipeline::{
    consensus_id, estimator_correlation, failed_row, fit_runtime_model, prepare_dataset,
    profile_pca, run_cell, BenchmarkReport, Clock, ProfilePca, RuntimeModel, SuiteConfig,
};
use idim_core::{Dataset, Method};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Monotonic wall clock, seconds since construction.
#[derive(Debug, Clone, Copy)]
pub struct InstantClock(Instant);

impl InstantClock {
    pub fn new() -> Self {
        InstantClock(Instant::now())
    }
}

impl Default for InstantClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for InstantClock {
    fn now(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Usage(format!("cannot start {jobs} worker threads: {e}")))
}

/// Same result as `idim_core::pipeline::run_suite` (apart from timings),
/// with dataset preparation and cells spread over `jobs` threads
/// (`0` = one per core). Every cell has its own seed, so the output does
/// not depend on `jobs`.
pub fn run_suite_parallel(
    datasets: &[Dataset],
    methods: &[Method],
    config: &SuiteConfig,
    calibration: &(dyn CalibrationSource + Sync),
    clock: &(dyn Clock + Sync),
    jobs: usize,
) -> Result<BenchmarkReport> {
    if datasets.is_empty() {
        return Err(Error::Usage("no datasets".into()));
    }
    if methods.is_empty() {
        return Err(Error::Usage("no methods".into()));
    }
    config.preprocess.validate()?;
    let pool = pool(jobs)?;
    let cells = pool.install(|| {
        let prepared: Vec<_> = datasets
            .par_iter()
            .map(|d| prepare_dataset(d, config))
            .collect();
        let m = methods.len();
        // Indexed collect keeps cell order, whatever the scheduling.
        let mut flat: Vec<Option<_>> = (0..datasets.len() * m)
            .into_par_iter()
            .map(|c| {
                prepared[c / m]
                    .as_ref()
                    .ok()
                    .map(|p| run_cell(p, methods[c % m], config, calibration, clock))
            })
            .collect();
        let mut rows = Vec::with_capacity(datasets.len());
        for (i, p) in prepared.iter().enumerate() {
            rows.push(match p {
                Ok(_) => flat[i * m..(i + 1) * m]
                    .iter_mut()
                    .map(|c| c.take().expect("cell computed"))
                    .collect(),
                Err(e) => failed_row(methods, &e.to_string()),
            });
        }
        rows
    });
    let names = datasets.iter().map(|d| d.name().to_string()).collect();
    Ok(BenchmarkReport::from_cells(names, methods, cells))
}

/// Everything derived from a suite run. Analyses that cannot be computed
/// (too few datasets, degenerate timings) are `None` with a warning.
#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    #[serde(flatten)]
    pub report: BenchmarkReport,
    pub profile_pca: Option<ProfilePca>,
    /// Per method, the model fitted to its cell timings.
    pub runtime_models: BTreeMap<String, Option<RuntimeModel>>,
}

impl Analysis {
    pub fn any_valid(&self) -> bool {
        self.report.valid.iter().flatten().any(|v| *v)
    }
}

pub fn analyze(mut report: BenchmarkReport) -> Analysis {
    if let Err(e) = consensus_id(&mut report) {
        report.warnings.push(format!("consensus: {e}"));
    }
    if report.consensus.is_some() {
        if let Err(e) = estimator_correlation(&mut report) {
            report.warnings.push(format!("correlation: {e}"));
        }
    }
    let profile = report.consensus.as_ref().and_then(|c| {
        let names: Vec<String> = c
            .columns
            .iter()
            .map(|&j| report.methods[j].clone())
            .collect();
        profile_pca(&c.zscores, &names)
            .map_err(|e| format!("profile PCA: {e}"))
            .ok()
    });
    if report.consensus.is_some() && profile.is_none() {
        report.warnings.push("profile PCA: not computable".into());
    }
    let mut runtime_models = BTreeMap::new();
    for (j, m) in report.methods.iter().enumerate() {
        let timings: Vec<(usize, usize, f64)> = report
            .cells
            .iter()
            .map(|row| &row[j])
            .filter(|c| c.estimate.valid && c.seconds > 0.0)
            .map(|c| (c.n_obj, c.n_var, c.seconds))
            .collect();
        runtime_models.insert(m.clone(), fit_runtime_model(&timings).ok());
    }
    Analysis {
        report,
        profile_pca: profile,
        runtime_models,
    }
}

/// One timing point of a runtime grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub method: String,
    pub n_obj: usize,
    pub n_var: usize,
    pub seconds: f64,
}

/// Times `methods` on seeded Gaussian data for every `(n_obj, n_var)` of
/// the grid, reporting the median of `repeats` runs per point. The data
/// has intrinsic dimension `min(5, n_var)`.
pub fn time_grid(
    methods: &[Method],
    n_objs: &[usize],
    n_vars: &[usize],
    repeats: usize,
    params: &idim_core::EstimatorParams,
    calibration: &dyn CalibrationSource,
    seed: u64,
) -> Result<Vec<Timing>> {
    if repeats == 0 {
        return Err(Error::Usage("repeats must be positive".into()));
    }
    let clock = InstantClock::new();
    let mut out = Vec::new();
    for &n_var in n_vars {
        for &n_obj in n_objs {
            let spec = idim_core::datasets::ManifoldSpec::new(
                "gaussian",
                n_var.min(5),
                n_var,
                n_obj,
                seed,
            );
            let data = idim_core::datasets::generate(&spec)?;
            for &m in methods {
                let mut runs = Vec::with_capacity(repeats);
                for _ in 0..repeats {
                    let t0 = clock.now();
                    idim_core::estimate_with(&data, m, params, seed, calibration)?;
                    runs.push(clock.now() - t0);
                }
                runs.sort_by(f64::total_cmp);
                out.push(Timing {
                    method: m.id().to_string(),
                    n_obj,
                    n_var,
                    seconds: runs[repeats / 2],
                });
            }
        }
    }
    Ok(out)
}

/// Fits one runtime model per method present in `timings`.
pub fn fit_timings(timings: &[Timing]) -> BTreeMap<String, idim_core::Result<RuntimeModel>> {
    let mut by_method: BTreeMap<String, Vec<(usize, usize, f64)>> = BTreeMap::new();
    for t in timings {
        by_method
            .entry(t.method.clone())
            .or_default()
            .push((t.n_obj, t.n_var, t.seconds));
    }
    by_method
        .into_iter()
        .map(|(m, t)| (m, fit_runtime_model(&t)))
        .collect()
}
