//! DANCo calibration tables cached on disk and in memory.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use idim_core::concentration::{danco_calibrate, CalibrationSource, DancoCalibration, DancoConfig};
use serde::{Deserialize, Serialize};

use crate::csvio::write_atomic;
use crate::error::{Error, Result};

/// Environment variable naming the cache directory.
pub const CACHE_DIR_ENV: &str = "IDIM_CACHE_DIR";
pub const CACHE_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CacheFile {
    schema_version: u32,
    calibration: DancoCalibration,
}

/// Calibration source that looks in memory, then on disk, and computes
/// (and stores) the table only when both miss.
///
/// Lookups take a shared lock; at most one thread computes at a time, so
/// concurrent cells needing the same table wait instead of duplicating
/// the work. Files are written to a temporary name and renamed, so other
/// processes never read a partial table.
#[derive(Debug, Default)]
pub struct DiskCache {
    dir: Option<PathBuf>,
    memo: RwLock<HashMap<DancoConfig, Arc<DancoCalibration>>>,
    compute: Mutex<()>,
    warnings: Mutex<Vec<String>>,
}

impl DiskCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        DiskCache {
            dir: Some(dir.into()),
            ..Default::default()
        }
    }

    /// Keeps tables for the lifetime of the process only.
    pub fn memory_only() -> Self {
        DiskCache::default()
    }

    /// Uses `$IDIM_CACHE_DIR`, else `idim-cache` under the system temp dir.
    pub fn from_env() -> Self {
        let dir = std::env::var_os(CACHE_DIR_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
            .unwrap_or_else(|| std::env::temp_dir().join("idim-cache"));
        DiskCache::new(dir)
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// File holding the table for `cfg`; every config field is in the name.
    pub fn path_for(&self, cfg: &DancoConfig) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| {
            d.join(format!(
                "danco-v{CACHE_SCHEMA_VERSION}-k{}-dmax{}-ncal{}-spd{}-seed{}.json",
                cfg.k, cfg.d_max, cfg.n_cal, cfg.samples_per_dim, cfg.seed
            ))
        })
    }

    /// Non-fatal problems (unreadable or unwritable cache files) so far.
    pub fn take_warnings(&self) -> Vec<String> {
        std::mem::take(&mut *self.warnings.lock().unwrap_or_else(|e| e.into_inner()))
    }

    fn warn(&self, msg: String) {
        self.warnings
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .push(msg);
    }

    fn memo_get(&self, cfg: &DancoConfig) -> Option<Arc<DancoCalibration>> {
        self.memo
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(cfg)
            .cloned()
    }

    pub fn get(&self, cfg: &DancoConfig) -> Result<Arc<DancoCalibration>> {
        if let Some(c) = self.memo_get(cfg) {
            return Ok(c);
        }
        let _guard = self.compute.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(c) = self.memo_get(cfg) {
            return Ok(c);
        }
        let path = self.path_for(cfg);
        let loaded = path.as_deref().and_then(|p| match load(p, cfg) {
            Ok(c) => c,
            Err(e) => {
                self.warn(format!("ignoring DANCo cache file: {e}"));
                None
            }
        });
        let cal = match loaded {
            Some(c) => Arc::new(c),
            None => {
                let c = Arc::new(danco_calibrate(cfg)?);
                if let Some(p) = &path {
                    if let Err(e) = store(p, &c) {
                        self.warn(format!("could not write DANCo cache: {e}"));
                    }
                }
                c
            }
        };
        self.memo
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .insert(cfg.clone(), cal.clone());
        Ok(cal)
    }
}

impl CalibrationSource for DiskCache {
    fn calibration(&self, cfg: &DancoConfig) -> idim_core::Result<Arc<DancoCalibration>> {
        self.get(cfg).map_err(|e| match e {
            Error::Id(e) => e,
            other => idim_core::IdError::DegenerateData(other.to_string()),
        })
    }
}

/// `Ok(None)` when no file exists; an error when one exists but is stale
/// or corrupt.
fn load(path: &Path, cfg: &DancoConfig) -> Result<Option<DancoCalibration>> {
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(Error::io(path, e)),
    };
    let file: CacheFile = serde_json::from_slice(&bytes)?;
    if file.schema_version != CACHE_SCHEMA_VERSION || file.calibration.config != *cfg {
        return Err(Error::Format {
            path: path.into(),
            message: "schema or configuration mismatch".into(),
        });
    }
    Ok(Some(file.calibration))
}

fn store(path: &Path, cal: &DancoCalibration) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = CacheFile {
        schema_version: CACHE_SCHEMA_VERSION,
        calibration: cal.clone(),
    };
    let bytes = serde_json::to_vec(&file)?;
    write_atomic(path, |w| w.write_all(&bytes))
}
