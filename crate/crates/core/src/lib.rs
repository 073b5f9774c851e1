//! Supervised contamination detection toolkit.
//!
//! Given labeled training samples from a reference density f0 and a
//! contaminant density f1, plus an unlabeled test sample, the library decides
//! whether the test sample contains a positive fraction of contaminant draws.
//! The pieces:
//!
//! - [`data`]: datasets, CSV ingestion, arcsinh preprocessing, part/est
//!   splitting, truncated-Gaussian simulation settings;
//! - [`partition`]: axis-aligned recursive binary partitions with nested
//!   snapshots and per-bin counting;
//! - [`histogram`]: thresholded histogram density-ratio estimates and the
//!   estimated signal;
//! - [`partitioner`]: DROP, the greedy density-ratio-oriented partitioning
//!   scheme, a Gini baseline, and partition-size selection;
//! - [`edrt`]: the estimated density ratio test with its non-asymptotic
//!   threshold and detectable-contamination diagnostic, plus the
//!   known-density oracle tests;
//! - [`bootstrap`]: bootstrap calibration of the test statistic (BEDRT);
//! - [`mmd`]: linear-time maximum mean discrepancy baseline;
//! - [`experiment`]: seeded simulation harness, power curves, detection-rate
//!   slope, robustness study;
//! - [`report`]: CSV/JSON emission.

pub mod bootstrap;
pub mod data;
pub mod edrt;
pub mod error;
pub mod experiment;
pub mod histogram;
pub mod mmd;
pub mod partition;
pub mod partitioner;
pub mod report;
pub mod rng;

pub use error::{Error, Result};
