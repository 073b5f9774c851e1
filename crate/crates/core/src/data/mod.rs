//! Datasets, ingestion, preprocessing, sample splitting, and synthetic
//! generators for the experimental settings.

mod csv_io;
mod gaussian;
mod preprocess;

pub use csv_io::{load_csv, write_csv};
pub use gaussian::{
    sample_mixture, sample_mixture_labeled, sample_truncated_gaussian, GaussianSetting,
    SettingLabel, TruncatedGaussian,
};
pub use preprocess::preprocess;

use crate::error::{Error, Result};
use crate::rng;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

/// Row-major matrix of d-dimensional points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointMatrix {
    data: Vec<f64>,
    d: usize,
}

impl PointMatrix {
    pub fn new(d: usize) -> Self {
        assert!(d >= 1, "dimension must be positive");
        PointMatrix { data: Vec::new(), d }
    }

    pub fn with_capacity(d: usize, rows: usize) -> Self {
        assert!(d >= 1, "dimension must be positive");
        PointMatrix {
            data: Vec::with_capacity(d * rows),
            d,
        }
    }

    pub fn from_rows(d: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let mut m = PointMatrix::with_capacity(d, rows.len());
        for r in rows {
            m.push(r)?;
        }
        Ok(m)
    }

    pub fn push(&mut self, row: &[f64]) -> Result<()> {
        if row.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: row.len(),
            });
        }
        self.data.extend_from_slice(row);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.data.len() / self.d
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.d)
    }

    /// Select rows by index into a new matrix.
    pub fn select(&self, idx: &[usize]) -> PointMatrix {
        let mut out = PointMatrix::with_capacity(self.d, idx.len());
        for &i in idx {
            out.data.extend_from_slice(self.row(i));
        }
        out
    }

    pub(crate) fn coord_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.data[i * self.d + j]
    }

    pub fn coord(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.d + j]
    }
}

/// Origin of a dataset row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Source {
    /// Drawn from the reference density f0 (label 0).
    Reference,
    /// Drawn from the contaminant density f1 (label 1).
    Contaminant,
    /// Unlabeled test point.
    Test,
}

impl Source {
    pub fn as_str(&self) -> &'static str {
        match self {
            Source::Reference => "0",
            Source::Contaminant => "1",
            Source::Test => "test",
        }
    }

    pub fn parse(s: &str) -> Option<Source> {
        match s.trim() {
            "0" => Some(Source::Reference),
            "1" => Some(Source::Contaminant),
            "test" | "Test" | "TEST" => Some(Source::Test),
            _ => None,
        }
    }
}

/// d-dimensional points with a per-row source tag.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabeledDataset {
    points: PointMatrix,
    source: Vec<Source>,
    n_reference: usize,
    n_contaminant: usize,
    n_test: usize,
}

impl LabeledDataset {
    pub fn new(points: PointMatrix, source: Vec<Source>) -> Result<Self> {
        if points.n() != source.len() {
            return Err(Error::InvalidParameter(format!(
                "points ({}) and source tags ({}) disagree",
                points.n(),
                source.len()
            )));
        }
        let mut counts = [0usize; 3];
        for s in &source {
            match s {
                Source::Reference => counts[0] += 1,
                Source::Contaminant => counts[1] += 1,
                Source::Test => counts[2] += 1,
            }
        }
        Ok(LabeledDataset {
            points,
            source,
            n_reference: counts[0],
            n_contaminant: counts[1],
            n_test: counts[2],
        })
    }

    pub fn n(&self) -> usize {
        self.points.n()
    }

    pub fn d(&self) -> usize {
        self.points.d()
    }

    pub fn points(&self) -> &PointMatrix {
        &self.points
    }

    pub(crate) fn points_mut(&mut self) -> &mut PointMatrix {
        &mut self.points
    }

    pub fn source(&self, i: usize) -> Source {
        self.source[i]
    }

    pub fn count(&self, source: Source) -> usize {
        match source {
            Source::Reference => self.n_reference,
            Source::Contaminant => self.n_contaminant,
            Source::Test => self.n_test,
        }
    }

    /// Row indices carrying the given tag, in row order.
    pub fn indices_of(&self, source: Source) -> Vec<usize> {
        self.source
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == source)
            .map(|(i, _)| i)
            .collect()
    }

    /// True when every coordinate lies in the closed unit interval.
    pub fn in_unit_cube(&self) -> bool {
        self.points.rows().all(|r| r.iter().all(|&x| (0.0..=1.0).contains(&x)))
    }
}

/// Disjoint part/est index sets over a [`LabeledDataset`], per source.
///
/// The est sizes are the n0 and n1 that enter every estimation formula.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleSplit {
    pub part_reference: Vec<usize>,
    pub est_reference: Vec<usize>,
    pub part_contaminant: Vec<usize>,
    pub est_contaminant: Vec<usize>,
}

impl SampleSplit {
    pub fn n0_part(&self) -> usize {
        self.part_reference.len()
    }
    pub fn n0_est(&self) -> usize {
        self.est_reference.len()
    }
    pub fn n1_part(&self) -> usize {
        self.part_contaminant.len()
    }
    pub fn n1_est(&self) -> usize {
        self.est_contaminant.len()
    }
}

/// Shuffle `0..n` and put the first `floor(frac * n)` indices in the part set.
pub(crate) fn split_indices(
    n: usize,
    frac_part: f64,
    rng: &mut impl rand::Rng,
) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let cut = ((frac_part * n as f64).floor() as usize).min(n);
    let est = idx.split_off(cut);
    (idx, est)
}

/// Randomly split each training source into part/est sets.
///
/// Part set size is `floor(frac_part * n_source)`; deterministic given seed.
pub fn split_training(ds: &LabeledDataset, frac_part: f64, seed: u64) -> Result<SampleSplit> {
    if !(0.0..1.0).contains(&frac_part) || frac_part == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "frac_part must be in (0,1), got {frac_part}"
        )));
    }
    let refs = ds.indices_of(Source::Reference);
    let cons = ds.indices_of(Source::Contaminant);
    if refs.is_empty() {
        return Err(Error::EmptySource("reference"));
    }
    if cons.is_empty() {
        return Err(Error::EmptySource("contaminant"));
    }
    if refs.len() < 2 {
        return Err(Error::TooFewRows {
            which: "reference",
            needed: 2,
            found: refs.len(),
        });
    }
    if cons.len() < 2 {
        return Err(Error::TooFewRows {
            which: "contaminant",
            needed: 2,
            found: cons.len(),
        });
    }

    let mut r0 = rng::rng_from(rng::mix(seed, &[0]));
    let mut r1 = rng::rng_from(rng::mix(seed, &[1]));
    let (p0, e0) = split_indices(refs.len(), frac_part, &mut r0);
    let (p1, e1) = split_indices(cons.len(), frac_part, &mut r1);
    let map = |local: Vec<usize>, global: &[usize]| -> Vec<usize> {
        let mut v: Vec<usize> = local.into_iter().map(|i| global[i]).collect();
        v.sort_unstable();
        v
    };
    Ok(SampleSplit {
        part_reference: map(p0, &refs),
        est_reference: map(e0, &refs),
        part_contaminant: map(p1, &cons),
        est_contaminant: map(e1, &cons),
    })
}
