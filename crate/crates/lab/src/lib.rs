//! Experiment harnesses, configuration, reporting and plotting around
//! [`critlab_core`].
//!
//! The binary target `critlab` exposes the harnesses as subcommands; see the
//! repository README for the file formats and the report schema.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod fieldio;
pub mod parallel;
pub mod plot;
pub mod ratefit;
pub mod report;

pub use config::RunConfig;
pub use ratefit::{fit_rate, RateFit};
pub use report::{FitRow, RatioRow, SweepReport, SweepRow};
