//! Scenario harness for sparse-array multiuser MIMO: config files, Monte
//! Carlo runs over array families, statistics and CSV/geometry output.
//!
//! The numerical models live in [`sparsemimo_core`], re-exported as [`core`].

pub mod config;
pub mod error;
pub mod export;
pub mod geometry_io;
pub mod parallel;
pub mod ratio;
pub mod scenario;
pub mod stats;

pub use sparsemimo_core as core;

pub use config::{Family, FamilyKind, ScenarioConfig, ScenarioKind};
pub use error::{Error, Result};
pub use ratio::{ratio_sweep, RatioRow};
pub use scenario::{run_scenario, ScenarioResult};
pub use stats::Cdf;

/// 17 significant digits: enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
