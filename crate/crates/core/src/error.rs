//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("csv parse error at line {line}: {msg}")]
    CsvParse { line: u64, msg: String },
    #[error("csv schema error: {0}")]
    CsvSchema(String),
    #[error("no rows in input")]
    NoRows,
    #[error("coordinate {axis} is degenerate (max equals min after transform)")]
    DegenerateAxis { axis: usize },
    #[error("source {0} has no rows")]
    EmptySource(&'static str),
    #[error("source {which} needs at least {needed} rows, found {found}")]
    TooFewRows {
        which: &'static str,
        needed: usize,
        found: usize,
    },
    #[error("rejection sampler acceptance rate below 1e-6 over 1e6 proposals")]
    PathologicalSetting,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("split value {value} is not strictly inside bin {bin} extent [{lo}, {hi}) on dim {dim}")]
    SplitOutOfRange {
        bin: usize,
        dim: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("unknown bin id {0}")]
    UnknownBin(usize),
    #[error("bin count length {got} does not match partition size {expected}")]
    BinCountMismatch { expected: usize, got: usize },
    #[error("threshold context violates test hypotheses: {0}")]
    InvalidContext(String),
    #[error("test sample is empty")]
    EmptyTestSample,
    #[error("density vanishes at a test point")]
    ZeroDensity,
    #[error("quadrature produced a non-finite value")]
    QuadratureNonFinite,
    #[error("estimated signal is zero; diagnostic undefined")]
    ZeroSignal,
    #[error("bootstrap pool too small: need n < n0_est, got n = {n}, n0_est = {n0_est}")]
    BootstrapPool { n: usize, n0_est: usize },
    #[error("sample too small for MMD: need at least 2 points per sample")]
    MmdTooSmall,
    #[error("MMD samples must have equal size, got {0} and {1}")]
    MmdSizeMismatch(usize, usize),
    #[error("all points identical; median-heuristic bandwidth is zero")]
    ZeroBandwidth,
    #[error("fewer than 3 curve points with rejection rate inside band [{lo}, {hi}]")]
    TooFewInBand { lo: f64, hi: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("tree json: {0}")]
    TreeJson(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
