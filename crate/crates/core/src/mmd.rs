//! Linear-time maximum mean discrepancy two-sample test with a permutation
//! null, the benchmark competitor.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::bootstrap::empirical_quantile;
use crate::data::PointMatrix;
use crate::error::{Error, Result};
use crate::rng;

/// Kernel bandwidth: fixed, or the median pairwise distance of the pooled
/// sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Bandwidth {
    Fixed(f64),
    MedianHeuristic,
}

/// Gaussian RBF kernel spec. k(x,y) = exp(-||x-y||^2 / (2 bw^2)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub bandwidth: Bandwidth,
}

impl KernelSpec {
    pub fn median() -> Self {
        KernelSpec {
            bandwidth: Bandwidth::MedianHeuristic,
        }
    }

    pub fn fixed(bw: f64) -> Self {
        KernelSpec {
            bandwidth: Bandwidth::Fixed(bw),
        }
    }

    /// Resolve to a concrete bandwidth, using the pooled sample when the
    /// median heuristic is requested.
    pub fn resolve(&self, pooled: &PointMatrix, cap: usize, seed: u64) -> Result<f64> {
        match self.bandwidth {
            Bandwidth::Fixed(bw) => {
                if bw > 0.0 {
                    Ok(bw)
                } else {
                    Err(Error::InvalidParameter(format!(
                        "bandwidth must be positive, got {bw}"
                    )))
                }
            }
            Bandwidth::MedianHeuristic => median_heuristic(pooled, cap, seed),
        }
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn gaussian_rbf(a: &[f64], b: &[f64], bandwidth: f64) -> f64 {
    (-sq_dist(a, b) / (2.0 * bandwidth * bandwidth)).exp()
}

/// Median pairwise Euclidean distance over at most `cap` subsampled points;
/// deterministic given seed. Errors when every pair coincides.
pub fn median_heuristic(z: &PointMatrix, cap: usize, seed: u64) -> Result<f64> {
    if z.n() < 2 {
        return Err(Error::MmdTooSmall);
    }
    let idx: Vec<usize> = if z.n() <= cap {
        (0..z.n()).collect()
    } else {
        let mut all: Vec<usize> = (0..z.n()).collect();
        let mut r = rng::rng_from(seed);
        let (head, _) = all.partial_shuffle(&mut r, cap);
        head.to_vec()
    };
    let mut dists = Vec::with_capacity(idx.len() * (idx.len() - 1) / 2);
    for i in 0..idx.len() {
        for j in i + 1..idx.len() {
            dists.push(sq_dist(z.row(idx[i]), z.row(idx[j])).sqrt());
        }
    }
    dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let med = dists[(dists.len() - 1) / 2];
    if med > 0.0 {
        Ok(med)
    } else {
        Err(Error::ZeroBandwidth)
    }
}

fn mmd_linear_indexed(
    pooled: &PointMatrix,
    xs: &[usize],
    ys: &[usize],
    bandwidth: f64,
) -> f64 {
    let pairs = xs.len() / 2;
    let mut total = 0.0;
    for i in 0..pairs {
        let (xa, xb) = (pooled.row(xs[2 * i]), pooled.row(xs[2 * i + 1]));
        let (ya, yb) = (pooled.row(ys[2 * i]), pooled.row(ys[2 * i + 1]));
        total += gaussian_rbf(xa, xb, bandwidth) + gaussian_rbf(ya, yb, bandwidth)
            - gaussian_rbf(xa, yb, bandwidth)
            - gaussian_rbf(xb, ya, bandwidth);
    }
    total / pairs as f64
}

/// Linear-time MMD estimate over consecutive disjoint pairs:
/// mean over i of k(x_{2i-1}, x_{2i}) + k(y_{2i-1}, y_{2i})
/// - k(x_{2i-1}, y_{2i}) - k(x_{2i}, y_{2i-1}).
///
/// Both samples must have the same size; an odd trailing point is dropped
/// from each.
pub fn mmd_linear(x: &PointMatrix, y: &PointMatrix, bandwidth: f64) -> Result<f64> {
    if x.n() != y.n() {
        return Err(Error::MmdSizeMismatch(x.n(), y.n()));
    }
    if x.n() < 2 {
        return Err(Error::MmdTooSmall);
    }
    let n = x.n() & !1; // drop the odd trailing point
    let pairs = n / 2;
    let mut total = 0.0;
    for i in 0..pairs {
        let (xa, xb) = (x.row(2 * i), x.row(2 * i + 1));
        let (ya, yb) = (y.row(2 * i), y.row(2 * i + 1));
        total += gaussian_rbf(xa, xb, bandwidth) + gaussian_rbf(ya, yb, bandwidth)
            - gaussian_rbf(xa, yb, bandwidth)
            - gaussian_rbf(xb, ya, bandwidth);
    }
    Ok(total / pairs as f64)
}

/// Outcome of the permutation-calibrated MMD test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MmdReport {
    pub statistic: f64,
    pub threshold: f64,
    pub reject: bool,
    pub bandwidth: f64,
    pub replicates: usize,
    pub alpha: f64,
}

/// Two-sample MMD test: the null distribution comes from `b` permutation
/// replicates of the pooled sample; reject when the observed statistic
/// strictly exceeds the empirical (1 - alpha) quantile.
pub fn mmd_test(
    reference: &PointMatrix,
    test: &PointMatrix,
    kernel: &KernelSpec,
    b: usize,
    alpha: f64,
    seed: u64,
) -> Result<MmdReport> {
    if reference.n() < 2 || test.n() < 2 {
        return Err(Error::MmdTooSmall);
    }
    if b == 0 {
        return Err(Error::InvalidParameter("bootstrap replicates must be >= 1".into()));
    }
    let n_ref = reference.n();
    let n_test = test.n();
    let mut pooled = PointMatrix::with_capacity(reference.d(), n_ref + n_test);
    for row in reference.rows() {
        pooled.push(row)?;
    }
    for row in test.rows() {
        pooled.push(row)?;
    }
    let bandwidth = kernel.resolve(&pooled, 1000, rng::mix(seed, &[0]))?;
    let m = n_ref.min(n_test);
    let xs: Vec<usize> = (0..m).collect();
    let ys: Vec<usize> = (n_ref..n_ref + m).collect();
    let observed = mmd_linear_indexed(&pooled, &xs, &ys, bandwidth);

    let mut replicates = Vec::with_capacity(b);
    let mut order: Vec<usize> = (0..n_ref + n_test).collect();
    for rep in 0..b {
        let mut r = rng::rng_from(rng::mix(seed, &[1, rep as u64]));
        order.shuffle(&mut r);
        replicates.push(mmd_linear_indexed(
            &pooled,
            &order[..m],
            &order[n_ref..n_ref + m],
            bandwidth,
        ));
    }
    let threshold = empirical_quantile(&mut replicates, 1.0 - alpha);
    Ok(MmdReport {
        statistic: observed,
        threshold,
        reject: observed > threshold,
        bandwidth,
        replicates: b,
        alpha,
    })
}
