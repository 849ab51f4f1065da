//! Registry of the 19 global estimators and a uniform dispatch.

use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use serde::Serialize;

use crate::concentration::{
    danco_id, ess_id, fisher_s_id, CalibrationSource, ComputeCalibration, DancoConfig, FisherParams,
};
use crate::dataset::Dataset;
use crate::error::{IdError, Result};
use crate::estimate::IdEstimate;
use crate::linear::{
    lpca_estimate, LpcaVariant, DEFAULT_ALPHA_FAN, DEFAULT_ALPHA_FO, DEFAULT_ALPHA_RATIO,
    DEFAULT_BETA_FAN,
};
use crate::nn::{
    corr_int, knn_graph_id, mada_id, mind_ml_id, mle_id, mom_id, tle_id, twonn_id, KnnGraphParams,
    MindVersion, NnParams, DEFAULT_DISCARD_FRACTION,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Method {
    LpcaFo,
    LpcaFan,
    LpcaMaxGap,
    LpcaRatio,
    LpcaPr,
    LpcaKaiser,
    LpcaBs,
    CorrInt,
    FisherS,
    Knn,
    Mada,
    MindMli,
    MindMlk,
    Mle,
    Mom,
    Tle,
    TwoNn,
    Danco,
    Ess,
}

impl Method {
    pub const ALL: [Method; 19] = [
        Method::LpcaFo,
        Method::LpcaFan,
        Method::LpcaMaxGap,
        Method::LpcaRatio,
        Method::LpcaPr,
        Method::LpcaKaiser,
        Method::LpcaBs,
        Method::CorrInt,
        Method::FisherS,
        Method::Knn,
        Method::Mada,
        Method::MindMli,
        Method::MindMlk,
        Method::Mle,
        Method::Mom,
        Method::Tle,
        Method::TwoNn,
        Method::Danco,
        Method::Ess,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Method::LpcaFo => "lpca_FO",
            Method::LpcaFan => "lpca_Fan",
            Method::LpcaMaxGap => "lpca_maxgap",
            Method::LpcaRatio => "lpca_ratio",
            Method::LpcaPr => "lpca_PR",
            Method::LpcaKaiser => "lpca_Kaiser",
            Method::LpcaBs => "lpca_BS",
            Method::CorrInt => "CorrInt",
            Method::FisherS => "FisherS",
            Method::Knn => "KNN",
            Method::Mada => "MADA",
            Method::MindMli => "MiND_MLi",
            Method::MindMlk => "MiND_MLk",
            Method::Mle => "MLE",
            Method::Mom => "MOM",
            Method::Tle => "TLE",
            Method::TwoNn => "TwoNN",
            Method::Danco => "DANCo",
            Method::Ess => "ESS",
        }
    }

    pub fn is_linear(self) -> bool {
        (self as usize) < 7
    }

    /// Smallest number of points the method accepts under `params`.
    pub fn min_points(self, params: &EstimatorParams) -> usize {
        let nn = &params.nn;
        match self {
            m if m.is_linear() => 3,
            Method::CorrInt | Method::Mle => nn.k2.max(2) + 1,
            Method::Mom | Method::Mada => nn.k.max(2) + 1,
            Method::Tle => nn.k.max(3) + 1,
            Method::MindMli | Method::MindMlk => nn.k.max(2) + 2,
            Method::TwoNn | Method::FisherS => 10,
            Method::Knn => 4 * (params.knn_graph.k + 1),
            Method::Ess => params.ess_k.max(2) + 1,
            Method::Danco => params.danco.k.max(2) + 2,
            _ => unreachable!(),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Method {
    type Err = IdError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.id() == s)
            .ok_or_else(|| IdError::Parameter(alloc::format!("unknown method '{s}'")))
    }
}

/// Parameters of every estimator, with the defaults used throughout.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorParams {
    pub alpha_fo: f64,
    pub alpha_ratio: f64,
    pub alpha_fan: f64,
    pub beta_fan: f64,
    pub nn: NnParams,
    pub twonn_discard: f64,
    pub knn_graph: KnnGraphParams,
    pub fisher: FisherParams,
    pub ess_k: usize,
    /// ESS search bound; `None` uses the number of columns.
    pub ess_d_max: Option<usize>,
    pub danco: DancoConfig,
}

impl Default for EstimatorParams {
    fn default() -> Self {
        EstimatorParams {
            alpha_fo: DEFAULT_ALPHA_FO,
            alpha_ratio: DEFAULT_ALPHA_RATIO,
            alpha_fan: DEFAULT_ALPHA_FAN,
            beta_fan: DEFAULT_BETA_FAN,
            nn: NnParams::default(),
            twonn_discard: DEFAULT_DISCARD_FRACTION,
            knn_graph: KnnGraphParams::default(),
            fisher: FisherParams::default(),
            ess_k: 20,
            ess_d_max: None,
            danco: DancoConfig::default(),
        }
    }
}

impl EstimatorParams {
    pub fn lpca_variant(&self, method: Method) -> Option<LpcaVariant> {
        Some(match method {
            Method::LpcaFo => LpcaVariant::FukunagaOlsen {
                alpha: self.alpha_fo,
            },
            Method::LpcaFan => LpcaVariant::Fan {
                alpha: self.alpha_fan,
                beta: self.beta_fan,
            },
            Method::LpcaMaxGap => LpcaVariant::MaxGap,
            Method::LpcaRatio => LpcaVariant::Ratio {
                alpha: self.alpha_ratio,
            },
            Method::LpcaPr => LpcaVariant::ParticipationRatio,
            Method::LpcaKaiser => LpcaVariant::Kaiser,
            Method::LpcaBs => LpcaVariant::BrokenStick,
            _ => return None,
        })
    }
}

/// Runs `method` on `data`. DANCo computes its calibration on demand; use
/// [`estimate_with`] to supply a cached one.
pub fn estimate(
    data: &Dataset,
    method: Method,
    params: &EstimatorParams,
    seed: u64,
) -> Result<IdEstimate> {
    estimate_with(data, method, params, seed, &ComputeCalibration)
}

pub fn estimate_with(
    data: &Dataset,
    method: Method,
    params: &EstimatorParams,
    seed: u64,
    calibration: &dyn CalibrationSource,
) -> Result<IdEstimate> {
    if let Some(v) = params.lpca_variant(method) {
        return lpca_estimate(data, v);
    }
    let nn = &params.nn;
    let e = match method {
        Method::CorrInt => corr_int(data, nn),
        Method::FisherS => fisher_s_id(data, &params.fisher, seed),
        Method::Knn => knn_graph_id(data, &params.knn_graph, seed),
        Method::Mada => mada_id(data, nn),
        Method::MindMli => mind_ml_id(data, nn, MindVersion::MLi),
        Method::MindMlk => mind_ml_id(data, nn, MindVersion::MLk),
        Method::Mle => mle_id(data, nn),
        Method::Mom => mom_id(data, nn),
        Method::Tle => tle_id(data, nn),
        Method::TwoNn => twonn_id(data, params.twonn_discard),
        Method::Ess => ess_id(data, params.ess_k, params.ess_d_max.unwrap_or(data.n_var())),
        Method::Danco => {
            let cal = calibration.calibration(&params.danco)?;
            danco_id(data, &cal)
        }
        _ => unreachable!(),
    }?;
    Ok(e.with_method(String::from(method.id())))
}
