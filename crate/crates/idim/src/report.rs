//! JSON and CSV report documents. Non-finite numbers serialize as `null`
//! in JSON and `NaN` in CSV.

use std::path::Path;

use idim_core::{Dataset, IdEstimate, Record};
use serde::Serialize;

use crate::csvio::{format_f64, write_atomic, write_table_to};
use crate::error::{Error, Result};
use crate::runner::Analysis;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct DatasetInfo {
    pub name: String,
    pub n_obj: usize,
    pub n_var: usize,
}

impl From<&Dataset> for DatasetInfo {
    fn from(d: &Dataset) -> Self {
        DatasetInfo {
            name: d.name().to_string(),
            n_obj: d.n_obj(),
            n_var: d.n_var(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateEntry {
    pub method: String,
    pub id: f64,
    pub valid: bool,
    pub params: Record,
    pub diagnostics: Record,
    pub seconds: f64,
}

impl EstimateEntry {
    pub fn new(e: IdEstimate, seconds: f64) -> Self {
        EstimateEntry {
            method: e.method,
            id: e.value,
            valid: e.valid,
            params: e.params,
            diagnostics: e.diagnostics,
            seconds,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    pub schema_version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub seed: u64,
    pub dataset: DatasetInfo,
    pub estimates: Vec<EstimateEntry>,
}

impl EstimateReport {
    pub fn new(data: &Dataset, seed: u64, estimates: Vec<EstimateEntry>) -> Self {
        EstimateReport {
            schema_version: SCHEMA_VERSION,
            tool: TOOL,
            tool_version: TOOL_VERSION,
            seed,
            dataset: data.into(),
            estimates,
        }
    }

    pub fn any_valid(&self) -> bool {
        self.estimates.iter().any(|e| e.valid)
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let mut v = serde_json::to_vec_pretty(self)?;
        v.push(b'\n');
        Ok(v)
    }

    /// One row per method: `method,id,valid,seconds`.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let header = ["method", "id", "valid", "seconds"].map(String::from);
        let rows: Vec<Vec<String>> = self
            .estimates
            .iter()
            .map(|e| {
                vec![
                    e.method.clone(),
                    format_f64(e.id),
                    e.valid.to_string(),
                    format!("{:.6}", e.seconds),
                ]
            })
            .collect();
        table_bytes(&header, &rows)
    }
}

fn table_bytes(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    write_table_to(&mut out, header, rows).map_err(|e| Error::io("<memory>", e))?;
    Ok(out)
}

#[derive(Serialize)]
struct BenchmarkDocument<'a, C: Serialize> {
    schema_version: u32,
    tool: &'static str,
    tool_version: &'static str,
    config: &'a C,
    #[serde(flatten)]
    analysis: &'a Analysis,
}

/// The bundle files a benchmark run writes, rendered in memory.
#[derive(Debug, Clone)]
pub struct Bundle {
    pub files: Vec<(&'static str, Vec<u8>)>,
}

pub const BUNDLE_FILES: [&str; 5] = [
    "id_matrix.csv",
    "zscores.csv",
    "consensus.csv",
    "correlation.csv",
    "report.json",
];

impl Bundle {
    /// `config` is echoed into `report.json`.
    pub fn render(analysis: &Analysis, config: &impl Serialize) -> Result<Bundle> {
        let r = &analysis.report;
        let mut header: Vec<String> = vec!["dataset".into()];
        header.extend(r.methods.iter().cloned());
        let id_rows = named_rows(&r.datasets, &r.id_matrix);
        let (z_header, z_rows, c_rows) = match &r.consensus {
            Some(c) => {
                let mut h: Vec<String> = vec!["dataset".into()];
                h.extend(c.columns.iter().map(|&j| r.methods[j].clone()));
                let cons = r
                    .datasets
                    .iter()
                    .zip(&c.consensus)
                    .map(|(d, v)| vec![d.clone(), format_f64(*v)])
                    .collect();
                (h, named_rows(&r.datasets, &c.zscores), cons)
            }
            None => (
                vec!["dataset".into()],
                r.datasets.iter().map(|d| vec![d.clone()]).collect(),
                Vec::new(),
            ),
        };
        let (corr_header, corr_rows) = match &r.correlation {
            Some(c) => {
                let mut h: Vec<String> = vec!["method".into()];
                h.extend(c.methods.iter().cloned());
                (h, named_rows(&c.methods, &c.matrix))
            }
            None => (vec!["method".into()], Vec::new()),
        };
        let doc = BenchmarkDocument {
            schema_version: SCHEMA_VERSION,
            tool: TOOL,
            tool_version: TOOL_VERSION,
            config,
            analysis,
        };
        let mut json = serde_json::to_vec_pretty(&doc)?;
        json.push(b'\n');
        let cons_header = ["dataset", "consensus"].map(String::from);
        Ok(Bundle {
            files: vec![
                (BUNDLE_FILES[0], table_bytes(&header, &id_rows)?),
                (BUNDLE_FILES[1], table_bytes(&z_header, &z_rows)?),
                (BUNDLE_FILES[2], table_bytes(&cons_header, &c_rows)?),
                (BUNDLE_FILES[3], table_bytes(&corr_header, &corr_rows)?),
                (BUNDLE_FILES[4], json),
            ],
        })
    }

    /// Writes every file atomically into `dir` (created if missing).
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, bytes) in &self.files {
            write_atomic(&dir.join(name), |w| w.write_all(bytes))?;
        }
        Ok(())
    }
}

fn named_rows(names: &[String], values: &[Vec<f64>]) -> Vec<Vec<String>> {
    names
        .iter()
        .zip(values)
        .map(|(n, row)| {
            std::iter::once(n.clone())
                .chain(row.iter().map(|&v| format_f64(v)))
                .collect()
        })
        .collect()
}
