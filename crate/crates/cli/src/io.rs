//! Shared input/output helpers for the subcommands.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use drtest::data::{load_csv, preprocess, GaussianSetting, LabeledDataset, PointMatrix, Source};

/// Write `content` to the output target, or stdout when none given.
pub fn write_output(out: &Option<PathBuf>, content: &[u8]) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content)
                .with_context(|| format!("writing {}", path.display()))?;
        }
        None => {
            std::io::stdout().write_all(content)?;
        }
    }
    Ok(())
}

pub fn parse_setting(name: &str) -> Result<GaussianSetting> {
    GaussianSetting::by_name(name)
        .with_context(|| format!("unknown setting `{name}` (expected A, B, C, or null)"))
}

pub fn parse_format(name: &str) -> Result<drtest::report::ReportFormat> {
    drtest::report::ReportFormat::parse(name)
        .with_context(|| format!("unknown format `{name}` (expected csv or json)"))
}

/// Load a training dataset; `source_override` applies when the file has no
/// source column.
pub fn load_dataset(path: &Path, source_override: Option<Source>) -> Result<LabeledDataset> {
    load_csv(path, source_override).with_context(|| format!("loading {}", path.display()))
}

/// Comma-separated list parser.
pub fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<T>()
                .map_err(|_| anyhow::anyhow!("bad {what} entry `{tok}`"))
        })
        .collect()
}

/// Apply the arcsinh unit-cube preprocessing jointly to train and test rows
/// so both share the same per-coordinate transform.
pub fn preprocess_jointly(
    train: LabeledDataset,
    test: PointMatrix,
) -> Result<(LabeledDataset, PointMatrix)> {
    let d = train.d();
    if !test.is_empty() && test.d() != d {
        bail!("train dimension {} != test dimension {}", d, test.d());
    }
    let mut points = PointMatrix::with_capacity(d, train.n() + test.n());
    let mut sources = Vec::with_capacity(train.n() + test.n());
    for i in 0..train.n() {
        points.push(train.points().row(i))?;
        sources.push(train.source(i));
    }
    for row in test.rows() {
        points.push(row)?;
        sources.push(Source::Test);
    }
    let combined = LabeledDataset::new(points, sources)?;
    let scaled = preprocess(&combined)?;
    let mut train_pts = PointMatrix::with_capacity(d, train.n());
    let mut train_srcs = Vec::with_capacity(train.n());
    let mut test_pts = PointMatrix::with_capacity(d, test.n());
    for i in 0..scaled.n() {
        if i < train.n() {
            train_pts.push(scaled.points().row(i))?;
            train_srcs.push(scaled.source(i));
        } else {
            test_pts.push(scaled.points().row(i))?;
        }
    }
    Ok((LabeledDataset::new(train_pts, train_srcs)?, test_pts))
}
