//! Intrinsic dimension (ID) estimation for point clouds.
//!
//! The crate is `no_std` and only needs `alloc`. It contains:
//!
//! - [`geometry`]: exact k-nearest-neighbour search, covariance spectra, PCA.
//! - [`linear`]: seven PCA-spectrum selection rules.
//! - [`nn`]: nearest-neighbour and fractal estimators (CorrInt, MLE, MOM,
//!   MADA, TLE, TwoNN, MiND_ML, kNN-graph length).
//! - [`concentration`]: concentration-of-measure estimators (FisherS, ESS,
//!   DANCo).
//! - [`local`]: any global estimator applied over k-NN neighbourhoods.
//! - [`datasets`]: seeded synthetic manifolds with known ID.
//! - [`pipeline`]: preprocessing, suite execution, z-score consensus,
//!   estimator correlation and runtime models.
//!
//! Wall-clock time and file IO live in the `idim` companion crate; the
//! suite runner here takes a [`pipeline::Clock`] so it stays pure.
#![no_std]
// `core` has unstable inherent float methods that shadow `num_traits::Float`
// for the unused-import lint although the trait is what gets called.
#![allow(unused_imports)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![warn(missing_debug_implementations)]

extern crate alloc;

mod dataset;
mod error;
mod estimate;

pub mod concentration;
pub mod datasets;
pub mod geometry;
pub mod linear;
pub mod local;
pub mod math;
pub mod methods;
pub mod nn;
pub mod pipeline;
pub mod rng;

pub use dataset::Dataset;
pub use error::{IdError, Result};
pub use estimate::{IdEstimate, Record, Value};

pub use methods::{estimate, estimate_with, EstimatorParams, Method};
