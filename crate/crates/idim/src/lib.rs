//! File formats, caching, timing and parallel execution around
//! [`idim_core`], plus the `idim` command-line tool.
//!
//! - [`csvio`]: dataset and table CSV reading and atomic writing.
//! - [`cache`]: DANCo calibration tables cached on disk.
//! - [`runner`]: wall clock, parallel suite runs and post-run analyses.
//! - [`report`]: versioned JSON reports and the benchmark CSV bundle.

pub mod cache;
pub mod csvio;
mod error;
pub mod report;
pub mod runner;

pub use error::{Error, Result};
pub use idim_core;
