//! Concentration-of-measure estimators.

mod danco;
mod ess;
mod fisher;

pub use danco::{
    calibration_sample, danco_calibrate, danco_id, danco_statistics, kl_norm, kl_von_mises,
    CalibrationSource, ComputeCalibration, DancoCalibration, DancoConfig, DancoStats,
};
pub use ess::{ess_id, ess_invert, ess_theoretical};
pub use fisher::{
    fisher_preprocess, fisher_s_id, inseparability_profile, invert_sphere_model,
    sphere_inseparability, FisherParams,
};
