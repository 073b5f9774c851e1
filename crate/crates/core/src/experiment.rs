//! Seeded simulation harness: power curves over (n_train, theta) grids for
//! the density-ratio tests and the MMD baseline, detection-rate slope
//! regression, and the mixture-robustness study.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bootstrap::{run_bedrt, BootstrapConfig};
use crate::data::{GaussianSetting, PointMatrix, TruncatedGaussian};
use crate::edrt::{self, run_test};
use crate::error::{Error, Result};
use crate::histogram::{estimate, make_context, population_signal, ThresholdContext};
use crate::mmd::{mmd_test, KernelSpec};
use crate::partition::{BinTable, PartitionTree};
use crate::partitioner::{
    grow_sequence, select_size, PartitionSequence, SelectionMode, SplitCriterion,
};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestKind {
    Edrt,
    Bedrt,
    Mmd,
    OracleLr,
}

impl TestKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TestKind::Edrt => "EDRT",
            TestKind::Bedrt => "BEDRT",
            TestKind::Mmd => "MMD",
            TestKind::OracleLr => "OracleLR",
        }
    }

    pub fn parse(s: &str) -> Option<TestKind> {
        match s.to_ascii_uppercase().as_str() {
            "EDRT" => Some(TestKind::Edrt),
            "BEDRT" => Some(TestKind::Bedrt),
            "MMD" => Some(TestKind::Mmd),
            "ORACLELR" | "ORACLE-LR" | "ORACLE" => Some(TestKind::OracleLr),
            _ => None,
        }
    }
}

/// Everything a grid run needs; fully determines the outputs together with
/// the seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub setting: GaussianSetting,
    pub n_train_grid: Vec<usize>,
    pub theta_grid: Vec<f64>,
    pub reps: usize,
    pub tests: Vec<TestKind>,
    pub alpha: f64,
    /// n0 = frac_n0 * n_train; the contaminant sample gets the rest.
    pub frac_n0: f64,
    /// Test sample size n = frac_test * n_train.
    pub frac_test: f64,
    /// Share of each training source used for growing the partition.
    pub frac_part: f64,
    pub k_max: usize,
    pub criterion: SplitCriterion,
    pub selection: SelectionMode,
    pub bootstrap_reps: usize,
    pub bootstrap_quantile: f64,
    pub mmd_bootstrap_reps: usize,
    /// Quadrature resolution for the oracle test's population signal.
    pub oracle_grid: usize,
    pub seed: u64,
}

impl ExperimentPlan {
    /// Desk-scale defaults: n_train in {1e3, 3e3, 1e4, 3e4, 1e5}, 100 reps,
    /// a 12-point log grid of theta in [3e-3, 0.3].
    pub fn new(setting: GaussianSetting) -> Self {
        ExperimentPlan {
            setting,
            n_train_grid: vec![1_000, 3_000, 10_000, 30_000, 100_000],
            theta_grid: log_grid(3e-3, 0.3, 12),
            reps: 100,
            tests: vec![TestKind::Edrt, TestKind::Bedrt],
            alpha: 0.05,
            frac_n0: 0.7,
            frac_test: 0.1,
            frac_part: 0.5,
            k_max: 64,
            criterion: SplitCriterion::DensityRatio,
            selection: SelectionMode::Simplified,
            bootstrap_reps: 200,
            bootstrap_quantile: 0.95,
            mmd_bootstrap_reps: 200,
            oracle_grid: 512,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_train_grid.is_empty() || self.theta_grid.is_empty() {
            return Err(Error::InvalidParameter("grids must be non-empty".into()));
        }
        if self.reps == 0 {
            return Err(Error::InvalidParameter("reps must be >= 1".into()));
        }
        if self.tests.is_empty() {
            return Err(Error::InvalidParameter("no tests selected".into()));
        }
        if !(0.0 < self.frac_n0 && self.frac_n0 < 1.0) {
            return Err(Error::InvalidParameter("frac_n0 must be in (0,1)".into()));
        }
        if !(0.0 < self.frac_part && self.frac_part < 1.0) {
            return Err(Error::InvalidParameter("frac_part must be in (0,1)".into()));
        }
        Ok(())
    }
}

/// Log-spaced grid from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2 && lo > 0.0 && hi > lo);
    let step = (hi / lo).ln() / (points - 1) as f64;
    (0..points).map(|i| lo * (step * i as f64).exp()).collect()
}

/// One aggregated grid cell for one test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub n_train: usize,
    pub theta: f64,
    pub test: TestKind,
    pub reject_rate: f64,
    pub reps: usize,
    pub failures: usize,
    pub mean_sigma2_hat: f64,
    pub mean_k_star: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerCurve {
    pub plan: ExperimentPlan,
    pub rows: Vec<CurveRow>,
}

impl PowerCurve {
    pub fn any_failures(&self) -> bool {
        self.rows.iter().any(|r| r.failures > 0)
    }
}

/// Sample sizes derived from a plan for one n_train.
#[derive(Debug, Clone, Copy)]
struct Sizes {
    n0_part: usize,
    n0_est: usize,
    n1_part: usize,
    n1_est: usize,
    n: usize,
}

fn sizes_for(plan: &ExperimentPlan, n_train: usize) -> Sizes {
    let n0 = (plan.frac_n0 * n_train as f64).round() as usize;
    let n1 = n_train - n0;
    let n = ((plan.frac_test * n_train as f64).round() as usize).max(2);
    let n0_part = (plan.frac_part * n0 as f64).floor() as usize;
    let n1_part = (plan.frac_part * n1 as f64).floor() as usize;
    Sizes {
        n0_part,
        n0_est: n0 - n0_part,
        n1_part,
        n1_est: n1 - n1_part,
        n,
    }
}

struct FittedPartition {
    tree_star: PartitionTree,
    ctx_star: ThresholdContext,
    hist_sigma2: f64,
    k_star: usize,
    test_counts: Vec<u64>,
    hist: crate::histogram::ThresholdedHistogram,
}

/// Grow on part samples, select the size on est samples, and count the test
/// sample on the chosen partition.
#[allow(clippy::too_many_arguments)]
fn fit_and_count(
    plan: &ExperimentPlan,
    sizes: Sizes,
    part0: &PointMatrix,
    part1: &PointMatrix,
    est0: &PointMatrix,
    est1: &PointMatrix,
    test: &PointMatrix,
) -> Result<FittedPartition> {
    let u = (8.0 * plan.k_max as f64 / plan.alpha).ln();
    let part_ctx = make_context(
        plan.alpha,
        plan.k_max,
        sizes.n,
        sizes.n0_part.max(1),
        sizes.n1_part.max(1),
        Some(u),
        None,
    );
    let seq: PartitionSequence =
        grow_sequence(part0, part1, &part_ctx, plan.k_max, plan.criterion)?;
    let k_final = seq.k_final();

    // size selection runs on the part samples, keeping the chosen partition
    // independent of the est samples that calibrate and run the tests
    let part_final0 = seq.tree.count_points(part0, None)?;
    let part_final1 = seq.tree.count_points(part1, None)?;
    let part_per0 = seq.per_k_counts(&part_final0)?;
    let part_per1 = seq.per_k_counts(&part_final1)?;
    let mut part_hists = Vec::with_capacity(k_final);
    for k in 1..=k_final {
        let bins =
            BinTable::new(part_per0[k - 1].clone(), part_per1[k - 1].clone(), vec![0; k])?;
        part_hists.push(estimate(&part_ctx.with_k(k), &bins)?);
    }
    let sel = select_size(&part_hists, &part_ctx, plan.selection);
    let k_star = sel.k_star;

    let final0 = seq.tree.count_points(est0, None)?;
    let final1 = seq.tree.count_points(est1, None)?;
    let per0 = seq.per_k_counts(&final0)?;
    let per1 = seq.per_k_counts(&final1)?;
    let est_ctx = make_context(
        plan.alpha,
        k_star,
        sizes.n,
        sizes.n0_est,
        sizes.n1_est,
        Some(u),
        None,
    );
    let bins_star = BinTable::new(
        per0[k_star - 1].clone(),
        per1[k_star - 1].clone(),
        vec![0; k_star],
    )?;
    let hist = estimate(&est_ctx, &bins_star)?;
    let ctx_star = est_ctx;

    let map = seq.bin_map_at(k_star)?;
    let mut test_counts = vec![0u64; k_star];
    for row in test.rows() {
        test_counts[map[seq.tree.locate(row)?]] += 1;
    }
    Ok(FittedPartition {
        tree_star: seq.snapshot(k_star)?,
        ctx_star,
        hist_sigma2: hist.sigma2_hat,
        k_star,
        test_counts,
        hist,
    })
}

struct RepOutcome {
    rejects: Vec<(TestKind, bool)>,
    sigma2_hat: f64,
    k_star: usize,
}

#[allow(clippy::too_many_arguments)]
fn run_rep(
    plan: &ExperimentPlan,
    f0: &TruncatedGaussian,
    f1: &TruncatedGaussian,
    oracle_sigma2: Option<f64>,
    n_train: usize,
    theta: f64,
    rep_seed: u64,
) -> Result<RepOutcome> {
    let sizes = sizes_for(plan, n_train);
    let needs_partition = plan
        .tests
        .iter()
        .any(|t| matches!(t, TestKind::Edrt | TestKind::Bedrt));
    let needs_est0 = needs_partition || plan.tests.contains(&TestKind::Mmd);

    let mut r_test = rng::rng_from(rng::mix(rep_seed, &[4]));
    let test = mixture_sample(f0, f1, theta, sizes.n, &mut r_test)?;

    let est0 = if needs_est0 {
        let mut r = rng::rng_from(rng::mix(rep_seed, &[1]));
        f0.sample(sizes.n0_est, &mut r)?
    } else {
        PointMatrix::new(f0.dim())
    };

    let mut fitted: Option<FittedPartition> = None;
    let mut est1 = PointMatrix::new(f0.dim());
    if needs_partition {
        let mut r0 = rng::rng_from(rng::mix(rep_seed, &[0]));
        let part0 = f0.sample(sizes.n0_part, &mut r0)?;
        let mut r2 = rng::rng_from(rng::mix(rep_seed, &[2]));
        let part1 = f1.sample(sizes.n1_part, &mut r2)?;
        let mut r3 = rng::rng_from(rng::mix(rep_seed, &[3]));
        est1 = f1.sample(sizes.n1_est, &mut r3)?;
        fitted = Some(fit_and_count(
            plan, sizes, &part0, &part1, &est0, &est1, &test,
        )?);
    }

    let mut rejects = Vec::with_capacity(plan.tests.len());
    for &t in &plan.tests {
        let reject = match t {
            TestKind::Edrt => {
                let f = fitted.as_ref().expect("partition fitted");
                run_test(&f.hist, &f.ctx_star, &f.test_counts, sizes.n)?.reject
            }
            TestKind::Bedrt => {
                let f = fitted.as_ref().expect("partition fitted");
                let cfg = BootstrapConfig {
                    replicates: plan.bootstrap_reps,
                    quantile_level: plan.bootstrap_quantile,
                    seed: rng::mix(rep_seed, &[5]),
                };
                run_bedrt(&f.tree_star, &est0, &est1, &test, &f.ctx_star, &cfg)?.reject
            }
            TestKind::Mmd => {
                let m = sizes.n.min(est0.n());
                let reference = est0.select(&(0..m).collect::<Vec<_>>());
                let test_m = if test.n() > m {
                    test.select(&(0..m).collect::<Vec<_>>())
                } else {
                    test.clone()
                };
                mmd_test(
                    &reference,
                    &test_m,
                    &KernelSpec::median(),
                    plan.mmd_bootstrap_reps,
                    plan.alpha,
                    rng::mix(rep_seed, &[6]),
                )?
                .reject
            }
            TestKind::OracleLr => {
                let sigma2 = oracle_sigma2.expect("oracle signal precomputed");
                edrt::oracle_lr_with_sigma2(f0, f1, &test, plan.alpha, sigma2)?.reject
            }
        };
        rejects.push((t, reject));
    }
    let (sigma2_hat, k_star) = fitted
        .as_ref()
        .map(|f| (f.hist_sigma2, f.k_star))
        .unwrap_or((f64::NAN, 0));
    Ok(RepOutcome {
        rejects,
        sigma2_hat,
        k_star,
    })
}

fn mixture_sample(
    f0: &TruncatedGaussian,
    f1: &TruncatedGaussian,
    theta: f64,
    n: usize,
    rng: &mut impl rand::Rng,
) -> Result<PointMatrix> {
    let mut out = PointMatrix::with_capacity(f0.dim(), n);
    for _ in 0..n {
        let from_f1 = rng.gen::<f64>() < theta;
        let row = if from_f1 {
            f1.sample(1, rng)?
        } else {
            f0.sample(1, rng)?
        };
        out.push(row.row(0))?;
    }
    Ok(out)
}

/// Run the full grid. Deterministic given the plan (incl. seed); rep work is
/// distributed over a thread pool with per-rep derived seeds, so the output
/// does not depend on scheduling.
pub fn run_plan(plan: &ExperimentPlan) -> Result<PowerCurve> {
    plan.validate()?;
    let f0 = plan.setting.f0();
    let f1 = plan.setting.f1();
    let oracle_sigma2 = if plan.tests.contains(&TestKind::OracleLr) {
        Some(population_signal(&f0, &f1, None, plan.oracle_grid)?)
    } else {
        None
    };

    let mut units = Vec::new();
    for (ni, &n_train) in plan.n_train_grid.iter().enumerate() {
        for (ti, &theta) in plan.theta_grid.iter().enumerate() {
            for rep in 0..plan.reps {
                units.push((ni, ti, n_train, theta, rep));
            }
        }
    }
    let outcomes: Vec<Result<RepOutcome>> = units
        .par_iter()
        .map(|&(ni, ti, n_train, theta, rep)| {
            let rep_seed = rng::mix(plan.seed, &[ni as u64, ti as u64, rep as u64]);
            run_rep(plan, &f0, &f1, oracle_sigma2, n_train, theta, rep_seed)
        })
        .collect();

    let mut rows = Vec::new();
    let mut cursor = 0usize;
    for &n_train in &plan.n_train_grid {
        for &theta in &plan.theta_grid {
            let cell = &outcomes[cursor..cursor + plan.reps];
            cursor += plan.reps;
            let mut failures = 0usize;
            let mut sigma2_sum = 0.0;
            let mut k_star_sum = 0.0;
            let mut ok = 0usize;
            let mut reject_counts = vec![0usize; plan.tests.len()];
            for outcome in cell {
                match outcome {
                    Ok(o) => {
                        ok += 1;
                        sigma2_sum += o.sigma2_hat;
                        k_star_sum += o.k_star as f64;
                        for (i, &(_, rej)) in o.rejects.iter().enumerate() {
                            if rej {
                                reject_counts[i] += 1;
                            }
                        }
                    }
                    Err(_) => failures += 1,
                }
            }
            for (i, &t) in plan.tests.iter().enumerate() {
                rows.push(CurveRow {
                    n_train,
                    theta,
                    test: t,
                    reject_rate: if ok > 0 {
                        reject_counts[i] as f64 / ok as f64
                    } else {
                        f64::NAN
                    },
                    reps: plan.reps,
                    failures,
                    mean_sigma2_hat: if ok > 0 { sigma2_sum / ok as f64 } else { f64::NAN },
                    mean_k_star: if ok > 0 { k_star_sum / ok as f64 } else { f64::NAN },
                });
            }
        }
    }
    Ok(PowerCurve {
        plan: plan.clone(),
        rows,
    })
}

/// OLS fit of ln(theta) on ln(1/n_train) over the curve points of `test`
/// whose rejection rate falls inside `[band.0, band.1]`.
pub fn detection_slope(
    curve: &PowerCurve,
    test: TestKind,
    band: (f64, f64),
) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = curve
        .rows
        .iter()
        .filter(|r| {
            r.test == test
                && r.theta > 0.0
                && r.reject_rate.is_finite()
                && r.reject_rate >= band.0
                && r.reject_rate <= band.1
        })
        .map(|r| ((1.0 / r.n_train as f64).ln(), r.theta.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::TooFewInBand {
            lo: band.0,
            hi: band.1,
        });
    }
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::TooFewInBand {
            lo: band.0,
            hi: band.1,
        });
    }
    let slope = sxy / sxx;
    Ok((slope, mean_y - slope * mean_x))
}

/// Which phase of the robustness study uses the shifted mixture weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShiftDirection {
    /// Training reference at the nominal half/half mixture; the test-time
    /// reference uses weight pi.
    TrainShift,
    /// Training reference at weight pi; test-time reference at half/half.
    TestShift,
}

impl ShiftDirection {
    pub fn as_str(&self) -> &'static str {
        match self {
            ShiftDirection::TrainShift => "train_shift",
            ShiftDirection::TestShift => "test_shift",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "train_shift" | "train-shift" => Some(ShiftDirection::TrainShift),
            "test_shift" | "test-shift" => Some(ShiftDirection::TestShift),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RobustnessConfig {
    pub n_train: usize,
    pub theta: f64,
    pub reps: usize,
    pub alpha: f64,
    pub frac_n0: f64,
    pub frac_test: f64,
    pub frac_part: f64,
    pub k_max: usize,
    pub seed: u64,
}

impl Default for RobustnessConfig {
    fn default() -> Self {
        RobustnessConfig {
            n_train: 100_000,
            theta: 0.015,
            reps: 20,
            alpha: 0.05,
            frac_n0: 0.7,
            frac_test: 0.1,
            frac_part: 0.5,
            k_max: 64,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessRow {
    pub pi: f64,
    pub reject_rate_h0: f64,
    pub reject_rate_h1: f64,
    pub reps: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RobustnessTable {
    pub direction: ShiftDirection,
    pub config: RobustnessConfig,
    pub rows: Vec<RobustnessRow>,
}

fn two_component_sample(
    pi: f64,
    g_a: &TruncatedGaussian,
    g_b: &TruncatedGaussian,
    n: usize,
    rng: &mut impl rand::Rng,
) -> Result<PointMatrix> {
    let mut out = PointMatrix::with_capacity(g_a.dim(), n);
    for _ in 0..n {
        let row = if rng.gen::<f64>() < pi {
            g_a.sample(1, rng)?
        } else {
            g_b.sample(1, rng)?
        };
        out.push(row.row(0))?;
    }
    Ok(out)
}

/// Reference drifts between training and test time: f0 is a two-component
/// truncated-Gaussian mixture whose weight changes in the chosen phase.
/// The EDRT is run under H0 and under contamination `theta` for each pi.
pub fn robustness_mixture_study(
    pi_grid: &[f64],
    direction: ShiftDirection,
    cfg: &RobustnessConfig,
) -> Result<RobustnessTable> {
    if pi_grid.is_empty() {
        return Err(Error::InvalidParameter("pi grid must be non-empty".into()));
    }
    let g_a = TruncatedGaussian::new(vec![0.3, 0.6], vec![0.01, 0.01])?;
    let g_b = TruncatedGaussian::new(vec![0.6, 0.3], vec![0.01, 0.01])?;
    let f1 = TruncatedGaussian::new(vec![0.6, 0.6], vec![0.01, 0.01])?;

    let plan_like = ExperimentPlan {
        frac_n0: cfg.frac_n0,
        frac_test: cfg.frac_test,
        frac_part: cfg.frac_part,
        k_max: cfg.k_max,
        alpha: cfg.alpha,
        ..ExperimentPlan::new(GaussianSetting::b())
    };

    let units: Vec<(usize, usize)> = pi_grid
        .iter()
        .enumerate()
        .flat_map(|(pi_idx, _)| (0..cfg.reps).map(move |rep| (pi_idx, rep)))
        .collect();

    let outcomes: Vec<Result<(bool, bool)>> = units
        .par_iter()
        .map(|&(pi_idx, rep)| {
            let pi = pi_grid[pi_idx];
            let (pi_train, pi_test) = match direction {
                ShiftDirection::TrainShift => (0.5, pi),
                ShiftDirection::TestShift => (pi, 0.5),
            };
            let rep_seed = rng::mix(cfg.seed, &[pi_idx as u64, rep as u64]);
            let sizes = sizes_for(&plan_like, cfg.n_train);

            let mut r0 = rng::rng_from(rng::mix(rep_seed, &[0]));
            let part0 = two_component_sample(pi_train, &g_a, &g_b, sizes.n0_part, &mut r0)?;
            let mut r1 = rng::rng_from(rng::mix(rep_seed, &[1]));
            let est0 = two_component_sample(pi_train, &g_a, &g_b, sizes.n0_est, &mut r1)?;
            let mut r2 = rng::rng_from(rng::mix(rep_seed, &[2]));
            let part1 = f1.sample(sizes.n1_part, &mut r2)?;
            let mut r3 = rng::rng_from(rng::mix(rep_seed, &[3]));
            let est1 = f1.sample(sizes.n1_est, &mut r3)?;

            // H0 test sample from the test-phase mixture
            let mut r4 = rng::rng_from(rng::mix(rep_seed, &[4]));
            let test_h0 = two_component_sample(pi_test, &g_a, &g_b, sizes.n, &mut r4)?;
            // H1 test sample with contamination fraction theta
            let mut r5 = rng::rng_from(rng::mix(rep_seed, &[5]));
            let mut test_h1 = PointMatrix::with_capacity(2, sizes.n);
            for _ in 0..sizes.n {
                let row = if r5.gen::<f64>() < cfg.theta {
                    f1.sample(1, &mut r5)?
                } else {
                    two_component_sample(pi_test, &g_a, &g_b, 1, &mut r5)?
                };
                test_h1.push(row.row(0))?;
            }

            let fit_h0 = fit_and_count(
                &plan_like, sizes, &part0, &part1, &est0, &est1, &test_h0,
            )?;
            let rej_h0 =
                run_test(&fit_h0.hist, &fit_h0.ctx_star, &fit_h0.test_counts, sizes.n)?
                    .reject;
            let map_counts = |f: &FittedPartition, pts: &PointMatrix| -> Result<Vec<u64>> {
                f.tree_star.count_points(pts, None)
            };
            let counts_h1 = map_counts(&fit_h0, &test_h1)?;
            let rej_h1 =
                run_test(&fit_h0.hist, &fit_h0.ctx_star, &counts_h1, sizes.n)?.reject;
            Ok((rej_h0, rej_h1))
        })
        .collect();

    let mut rows = Vec::with_capacity(pi_grid.len());
    let mut cursor = 0usize;
    for &pi in pi_grid {
        let cell = &outcomes[cursor..cursor + cfg.reps];
        cursor += cfg.reps;
        let mut h0 = 0usize;
        let mut h1 = 0usize;
        let mut ok = 0usize;
        let mut failures = 0usize;
        for o in cell {
            match o {
                Ok((a, b)) => {
                    ok += 1;
                    h0 += *a as usize;
                    h1 += *b as usize;
                }
                Err(_) => failures += 1,
            }
        }
        rows.push(RobustnessRow {
            pi,
            reject_rate_h0: if ok > 0 { h0 as f64 / ok as f64 } else { f64::NAN },
            reject_rate_h1: if ok > 0 { h1 as f64 / ok as f64 } else { f64::NAN },
            reps: cfg.reps,
            failures,
        });
    }
    Ok(RobustnessTable {
        direction,
        config: cfg.clone(),
        rows,
    })
}
