//! Bootstrap calibration of the test statistic on a fixed partition (BEDRT).
//!
//! Each replicate draws a pseudo test sample of size n from the est
//! reference points without replacement, re-estimates the density ratio from
//! resamples of the remaining est points, and records the statistic. The
//! threshold tau is the empirical quantile of the replicate statistics; the
//! real test rejects when its statistic strictly exceeds tau.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::PointMatrix;
use crate::edrt::{statistic, theta_detectable, TestReport};
use crate::error::{Error, Result};
use crate::histogram::{estimate, ThresholdContext};
use crate::partition::{BinTable, PartitionTree};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    /// Number of bootstrap replicates B.
    pub replicates: usize,
    /// Quantile level of the recorded statistics used as tau.
    pub quantile_level: f64,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            replicates: 200,
            quantile_level: 0.95,
            seed: 0,
        }
    }
}

impl BootstrapConfig {
    fn check(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidParameter("replicates must be >= 1".into()));
        }
        if !(0.0 < self.quantile_level && self.quantile_level < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "quantile level must be in (0,1), got {}",
                self.quantile_level
            )));
        }
        Ok(())
    }
}

/// Upper empirical quantile: 1-based order statistic ceil(level * B).
pub fn empirical_quantile(values: &mut [f64], level: f64) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rank = ((level * values.len() as f64).ceil() as usize).clamp(1, values.len());
    values[rank - 1]
}

fn locate_all(tree: &PartitionTree, points: &PointMatrix) -> Result<Vec<usize>> {
    points.rows().map(|row| tree.locate(row)).collect()
}

struct ReplicateSampler<'a> {
    bins0: &'a [usize],
    bins1: &'a [usize],
    k: usize,
    ctx: &'a ThresholdContext,
}

impl ReplicateSampler<'_> {
    /// One bootstrap replicate of the null statistic.
    fn draw(&self, rng: &mut impl Rng) -> Result<f64> {
        let n = self.ctx.n;
        let n0 = self.ctx.n0;
        let n1 = self.ctx.n1;
        // (i) pseudo test sample: n est-reference points without replacement
        let mut order: Vec<usize> = (0..self.bins0.len()).collect();
        let (test_idx, rest) = order.partial_shuffle(rng, n);
        let mut test_counts = vec![0u64; self.k];
        for &i in test_idx.iter() {
            test_counts[self.bins0[i]] += 1;
        }
        // (ii) n0 reference draws with replacement from the remaining points
        let mut c0 = vec![0u64; self.k];
        for _ in 0..n0 {
            let &i = rest.choose(rng).expect("n < n0_est leaves a remainder");
            c0[self.bins0[i]] += 1;
        }
        // (iii) n1 contaminant draws with replacement from the est sample
        let mut c1 = vec![0u64; self.k];
        for _ in 0..n1 {
            let i = rng.gen_range(0..self.bins1.len());
            c1[self.bins1[i]] += 1;
        }
        // (iv) thresholded ratio estimate, (v) statistic of the pseudo sample
        let bins = BinTable::new(c0, c1, test_counts.clone())?;
        let hist = estimate(self.ctx, &bins)?;
        statistic(&hist, &test_counts, n)
    }
}

/// The vector of replicate statistics. Replicate b uses an RNG stream derived
/// from (seed, b), so the set is independent of evaluation order.
pub fn bootstrap_replicates(
    tree: &PartitionTree,
    est0: &PointMatrix,
    est1: &PointMatrix,
    ctx: &ThresholdContext,
    cfg: &BootstrapConfig,
) -> Result<Vec<f64>> {
    cfg.check()?;
    if est1.n() == 0 {
        return Err(Error::EmptySource("contaminant"));
    }
    if ctx.n >= est0.n() {
        return Err(Error::BootstrapPool {
            n: ctx.n,
            n0_est: est0.n(),
        });
    }
    if ctx.k != tree.k() {
        return Err(Error::BinCountMismatch {
            expected: ctx.k,
            got: tree.k(),
        });
    }
    let bins0 = locate_all(tree, est0)?;
    let bins1 = locate_all(tree, est1)?;
    let sampler = ReplicateSampler {
        bins0: &bins0,
        bins1: &bins1,
        k: tree.k(),
        ctx,
    };
    (0..cfg.replicates)
        .map(|b| {
            let mut rng = crate::rng::rng_from(crate::rng::mix(cfg.seed, &[b as u64]));
            sampler.draw(&mut rng)
        })
        .collect()
}

/// Calibrated threshold tau.
pub fn bootstrap_threshold(
    tree: &PartitionTree,
    est0: &PointMatrix,
    est1: &PointMatrix,
    ctx: &ThresholdContext,
    cfg: &BootstrapConfig,
) -> Result<f64> {
    let mut stats = bootstrap_replicates(tree, est0, est1, ctx, cfg)?;
    Ok(empirical_quantile(&mut stats, cfg.quantile_level))
}

/// Run the bootstrap-calibrated test: re-estimate the ratio on the full est
/// samples, compute the statistic of the real test sample, and reject when
/// it strictly exceeds tau.
pub fn run_bedrt(
    tree: &PartitionTree,
    est0: &PointMatrix,
    est1: &PointMatrix,
    test_points: &PointMatrix,
    ctx: &ThresholdContext,
    cfg: &BootstrapConfig,
) -> Result<TestReport> {
    let tau = bootstrap_threshold(tree, est0, est1, ctx, cfg)?;
    let c0 = tree.count_points(est0, None)?;
    let c1 = tree.count_points(est1, None)?;
    let test_counts = tree.count_points(test_points, None)?;
    let n = test_points.n();
    if n == 0 {
        return Err(Error::EmptyTestSample);
    }
    let bins = BinTable::new(c0, c1, test_counts.clone())?;
    let hist = estimate(ctx, &bins)?;
    let stat = statistic(&hist, &test_counts, n)?;
    Ok(TestReport {
        statistic: stat,
        threshold: tau,
        reject: stat > tau,
        sigma2_hat: hist.sigma2_hat,
        k: hist.k(),
        k0: hist.k0,
        k1: hist.k1,
        max_abs_r_minus_1: hist.max_abs_r_minus_1(),
        theta_detectable: theta_detectable(&hist, ctx).ok(),
        threshold_terms: None,
        context: ctx.clone(),
    })
}
