//! Subcommand implementations.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde_json::json;

use drtest::bootstrap::{bootstrap_replicates, empirical_quantile, BootstrapConfig};
use drtest::data::{
    sample_mixture, sample_truncated_gaussian, write_csv, LabeledDataset, PointMatrix, Source,
};
use drtest::edrt::run_test;
use drtest::experiment::{
    detection_slope, log_grid, robustness_mixture_study, run_plan, CurveRow, ExperimentPlan,
    PowerCurve, RobustnessConfig, ShiftDirection, TestKind,
};
use drtest::histogram::{estimate, make_context, ThresholdContext, ThresholdedHistogram};
use drtest::mmd::{mmd_test, Bandwidth, KernelSpec};
use drtest::partition::{BinTable, PartitionTree};
use drtest::partitioner::{
    grow_sequence, select_size, SelectionMode, SizeSelection, SplitCriterion,
};
use drtest::report::{emit_power_curve, emit_robustness, histogram_json};

use crate::io;

pub struct Global {
    pub seed: u64,
    pub alpha: f64,
    pub out: Option<PathBuf>,
    pub format: String,
}

fn parse_criterion(s: &str) -> Result<SplitCriterion> {
    match s {
        "density-ratio" | "drop" => Ok(SplitCriterion::DensityRatio),
        "gini" => Ok(SplitCriterion::Gini),
        other => bail!("unknown criterion `{other}` (expected density-ratio or gini)"),
    }
}

fn parse_selection(s: &str) -> Result<SelectionMode> {
    match s {
        "simplified" => Ok(SelectionMode::Simplified),
        "full" => Ok(SelectionMode::Full),
        other => bail!("unknown selection mode `{other}` (expected simplified or full)"),
    }
}

fn parse_tests(s: &str) -> Result<Vec<TestKind>> {
    s.split(',')
        .map(|tok| {
            TestKind::parse(tok.trim())
                .with_context(|| format!("unknown test `{tok}`"))
        })
        .collect()
}

// ---------------------------------------------------------------- simulate

#[derive(Args)]
pub struct SimulateArgs {
    /// Setting name: A, B, C, or null.
    #[arg(long, default_value = "A")]
    setting: String,
    /// Total training sample size; n0 = frac-n0 * n-train.
    #[arg(long, default_value_t = 1000)]
    n_train: usize,
    #[arg(long, default_value_t = 0.7)]
    frac_n0: f64,
    /// Also draw a test mixture of this size.
    #[arg(long, default_value_t = 0)]
    n_test: usize,
    /// Contamination fraction of the test mixture.
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
}

pub fn simulate(global: &Global, args: &SimulateArgs) -> Result<i32> {
    let setting = io::parse_setting(&args.setting)?;
    let n0 = (args.frac_n0 * args.n_train as f64).round() as usize;
    let n1 = args.n_train - n0;
    let x0 = sample_truncated_gaussian(&setting, 0, n0, drtest::rng::mix(global.seed, &[0]))?;
    let x1 = sample_truncated_gaussian(&setting, 1, n1, drtest::rng::mix(global.seed, &[1]))?;
    let test = sample_mixture(
        &setting,
        args.theta,
        args.n_test,
        drtest::rng::mix(global.seed, &[2]),
    )?;
    let mut points = PointMatrix::with_capacity(setting.d(), n0 + n1 + args.n_test);
    let mut sources = Vec::new();
    for row in x0.rows() {
        points.push(row)?;
        sources.push(Source::Reference);
    }
    for row in x1.rows() {
        points.push(row)?;
        sources.push(Source::Contaminant);
    }
    for row in test.rows() {
        points.push(row)?;
        sources.push(Source::Test);
    }
    let ds = LabeledDataset::new(points, sources)?;
    let mut buf = Vec::new();
    write_csv(&ds, &mut buf)?;
    io::write_output(&global.out, &buf)?;
    Ok(0)
}

// -------------------------------------------------------------- common fit

#[derive(Args, Clone)]
pub struct FitOpts {
    /// Training CSV (source column with 0/1 rows). Mutually exclusive with
    /// --setting.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Synthesize training data from this setting instead of --input.
    #[arg(long)]
    setting: Option<String>,
    /// Training size when synthesizing.
    #[arg(long, default_value_t = 10_000)]
    n_train: usize,
    #[arg(long, default_value_t = 0.7)]
    frac_n0: f64,
    /// Share of each training source used for growing the partition.
    #[arg(long, default_value_t = 0.5)]
    frac_part: f64,
    #[arg(long, default_value_t = 64)]
    k_max: usize,
    #[arg(long, default_value = "density-ratio")]
    criterion: String,
    #[arg(long, default_value = "simplified")]
    selection: String,
    /// Apply the arcsinh unit-cube preprocessing to loaded CSV data.
    #[arg(long, default_value_t = false)]
    preprocess: bool,
}

struct Fitted {
    tree_star: PartitionTree,
    ctx_star: ThresholdContext,
    hist_star: ThresholdedHistogram,
    selection: SizeSelection,
    per_k_signal: Vec<f64>,
    est0: PointMatrix,
    est1: PointMatrix,
    k_final: usize,
    tree_json: serde_json::Value,
}

fn training_dataset(global: &Global, opts: &FitOpts) -> Result<LabeledDataset> {
    match (&opts.input, &opts.setting) {
        (Some(path), None) => io::load_dataset(path, None),
        (None, Some(name)) => {
            let setting = io::parse_setting(name)?;
            let n0 = (opts.frac_n0 * opts.n_train as f64).round() as usize;
            let n1 = opts.n_train - n0;
            let x0 =
                sample_truncated_gaussian(&setting, 0, n0, drtest::rng::mix(global.seed, &[10]))?;
            let x1 =
                sample_truncated_gaussian(&setting, 1, n1, drtest::rng::mix(global.seed, &[11]))?;
            let mut points = PointMatrix::with_capacity(setting.d(), n0 + n1);
            let mut sources = Vec::new();
            for row in x0.rows() {
                points.push(row)?;
                sources.push(Source::Reference);
            }
            for row in x1.rows() {
                points.push(row)?;
                sources.push(Source::Contaminant);
            }
            Ok(LabeledDataset::new(points, sources)?)
        }
        (Some(_), Some(_)) => bail!("--input and --setting are mutually exclusive"),
        (None, None) => bail!("one of --input or --setting is required"),
    }
}

/// Split, grow the sequence on part samples, and select the size on est
/// samples. `n_test` enters the threshold context.
fn fit(
    global: &Global,
    opts: &FitOpts,
    train: &LabeledDataset,
    n_test: usize,
) -> Result<Fitted> {
    let criterion = parse_criterion(&opts.criterion)?;
    let selection_mode = parse_selection(&opts.selection)?;
    let split = drtest::data::split_training(train, opts.frac_part, drtest::rng::mix(global.seed, &[12]))?;
    let part0 = train.points().select(&split.part_reference);
    let part1 = train.points().select(&split.part_contaminant);
    let est0 = train.points().select(&split.est_reference);
    let est1 = train.points().select(&split.est_contaminant);

    let u = (8.0 * opts.k_max as f64 / global.alpha).ln();
    let part_ctx = make_context(
        global.alpha,
        opts.k_max,
        n_test,
        split.n0_part().max(1),
        split.n1_part().max(1),
        Some(u),
        None,
    );
    let mut seq = grow_sequence(&part0, &part1, &part_ctx, opts.k_max, criterion)?;
    let k_final = seq.k_final();

    // size selection on the part samples keeps the chosen partition
    // independent of the est samples used for calibration and testing
    let pf0 = seq.tree.count_points(&part0, None)?;
    let pf1 = seq.tree.count_points(&part1, None)?;
    let pp0 = seq.per_k_counts(&pf0)?;
    let pp1 = seq.per_k_counts(&pf1)?;
    let mut part_hists = Vec::with_capacity(k_final);
    for k in 1..=k_final {
        let bins = BinTable::new(pp0[k - 1].clone(), pp1[k - 1].clone(), vec![0; k])?;
        part_hists.push(estimate(&part_ctx.with_k(k), &bins)?);
    }
    let selection = select_size(&part_hists, &part_ctx, selection_mode);
    let k_star = selection.k_star;

    let final0 = seq.tree.count_points(&est0, None)?;
    let final1 = seq.tree.count_points(&est1, None)?;
    let per0 = seq.per_k_counts(&final0)?;
    let per1 = seq.per_k_counts(&final1)?;
    let mut hists = Vec::with_capacity(k_final);
    for k in 1..=k_final {
        let ctx_k = make_context(
            global.alpha,
            k,
            n_test,
            split.n0_est(),
            split.n1_est(),
            Some(u),
            None,
        );
        let bins = BinTable::new(per0[k - 1].clone(), per1[k - 1].clone(), vec![0; k])?;
        hists.push(estimate(&ctx_k, &bins)?);
    }
    seq.per_k_signal = hists.iter().map(|h| h.sigma2_hat).collect();
    let per_k_signal = seq.per_k_signal.clone();
    let ctx_star = make_context(
        global.alpha,
        k_star,
        n_test,
        split.n0_est(),
        split.n1_est(),
        Some(u),
        None,
    );
    let hist_star = hists.swap_remove(k_star - 1);
    let tree_star = seq.snapshot(k_star)?;
    let tree_json = tree_star.to_json();
    Ok(Fitted {
        tree_star,
        ctx_star,
        hist_star,
        selection,
        per_k_signal,
        est0,
        est1,
        k_final,
        tree_json,
    })
}

// ---------------------------------------------------------- fit-partition

#[derive(Args)]
pub struct FitArgs {
    #[command(flatten)]
    fit: FitOpts,
    /// Intended test sample size (enters the size-selection criterion).
    /// Defaults to a tenth of the training rows.
    #[arg(long)]
    n_test: Option<usize>,
}

pub fn fit_partition(global: &Global, args: &FitArgs) -> Result<i32> {
    let mut train = training_dataset(global, &args.fit)?;
    if args.fit.preprocess {
        let empty = PointMatrix::new(train.d());
        (train, _) = io::preprocess_jointly(train, empty)?;
    }
    let n_test = args.n_test.unwrap_or_else(|| (train.n() / 10).max(2));
    let fitted = fit(global, &args.fit, &train, n_test)?;
    let doc = json!({
        "k_star": fitted.selection.k_star,
        "k_final": fitted.k_final,
        "zero_signal": fitted.selection.zero_signal,
        "per_k_signal": fitted.per_k_signal,
        "selection_scores": fitted.selection.scores,
        "sigma2_hat": fitted.hist_star.sigma2_hat,
        "tree": fitted.tree_json,
        "seed": global.seed,
        "alpha": global.alpha,
    });
    io::write_output(&global.out, format!("{:#}\n", doc).as_bytes())?;
    Ok(0)
}

// ------------------------------------------------------------- edrt/bedrt

#[derive(Args)]
pub struct TestArgs {
    #[command(flatten)]
    fit: FitOpts,
    /// Test sample CSV (feature columns; a source column, when present, is
    /// filtered to `test` rows).
    #[arg(long)]
    test: Option<PathBuf>,
    /// Synthesized test sample size (with --setting).
    #[arg(long, default_value_t = 1000)]
    n_test: usize,
    /// Contamination fraction of the synthesized test sample.
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
}

fn test_inputs(global: &Global, args: &TestArgs) -> Result<(LabeledDataset, PointMatrix)> {
    let mut train = training_dataset(global, &args.fit)?;
    let mut test = match (&args.test, &args.fit.setting) {
        (Some(path), _) => {
            let ds = io::load_dataset(path, Some(Source::Test))?;
            let idx = ds.indices_of(Source::Test);
            ds.points().select(&idx)
        }
        (None, Some(name)) => {
            let setting = io::parse_setting(name)?;
            sample_mixture(
                &setting,
                args.theta,
                args.n_test,
                drtest::rng::mix(global.seed, &[13]),
            )?
        }
        (None, None) => bail!("a test sample is required: --test or --setting"),
    };
    if args.fit.preprocess {
        (train, test) = io::preprocess_jointly(train, test)?;
    }
    if test.n() == 0 {
        bail!("test sample is empty");
    }
    Ok((train, test))
}

pub fn edrt(global: &Global, args: &TestArgs) -> Result<i32> {
    let (train, test) = test_inputs(global, args)?;
    let fitted = fit(global, &args.fit, &train, test.n())?;
    let counts = fitted.tree_star.count_points(&test, None)?;
    let report = run_test(&fitted.hist_star, &fitted.ctx_star, &counts, test.n())?;
    let doc = json!({
        "test": "EDRT",
        "report": report,
        "histogram": histogram_json(&fitted.hist_star, &fitted.ctx_star),
        "k_star": fitted.selection.k_star,
        "tree": fitted.tree_json,
        "seed": global.seed,
    });
    io::write_output(&global.out, format!("{:#}\n", doc).as_bytes())?;
    Ok(0)
}

#[derive(Args)]
pub struct BedrtArgs {
    #[command(flatten)]
    test_args: TestArgs,
    #[arg(long, default_value_t = 200)]
    bootstrap_reps: usize,
    #[arg(long, default_value_t = 0.95)]
    quantile: f64,
    /// Include the full replicate statistic vector in the output.
    #[arg(long, default_value_t = false)]
    emit_replicates: bool,
}

pub fn bedrt(global: &Global, args: &BedrtArgs) -> Result<i32> {
    let (train, test) = test_inputs(global, &args.test_args)?;
    let fitted = fit(global, &args.test_args.fit, &train, test.n())?;
    let cfg = BootstrapConfig {
        replicates: args.bootstrap_reps,
        quantile_level: args.quantile,
        seed: drtest::rng::mix(global.seed, &[14]),
    };
    let report = drtest::bootstrap::run_bedrt(
        &fitted.tree_star,
        &fitted.est0,
        &fitted.est1,
        &test,
        &fitted.ctx_star,
        &cfg,
    )?;
    let mut doc = json!({
        "test": "BEDRT",
        "report": report,
        "tau": report.threshold,
        "k_star": fitted.selection.k_star,
        "tree": fitted.tree_json,
        "seed": global.seed,
    });
    if args.emit_replicates {
        let mut reps = bootstrap_replicates(
            &fitted.tree_star,
            &fitted.est0,
            &fitted.est1,
            &fitted.ctx_star,
            &cfg,
        )?;
        let tau = empirical_quantile(&mut reps, cfg.quantile_level);
        debug_assert_eq!(tau, report.threshold);
        doc["replicates"] = json!(reps);
    }
    io::write_output(&global.out, format!("{:#}\n", doc).as_bytes())?;
    Ok(0)
}

// -------------------------------------------------------------------- mmd

#[derive(Args)]
pub struct MmdArgs {
    /// Reference sample CSV.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Test sample CSV.
    #[arg(long)]
    test: Option<PathBuf>,
    /// Synthesize both samples from this setting.
    #[arg(long)]
    setting: Option<String>,
    /// Per-sample size when synthesizing.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Contamination fraction of the synthesized test sample.
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    /// Gaussian RBF bandwidth: a number, or `median`.
    #[arg(long, default_value = "median")]
    kernel_bandwidth: String,
    #[arg(long, default_value_t = 200)]
    bootstrap_reps: usize,
}

pub fn mmd(global: &Global, args: &MmdArgs) -> Result<i32> {
    let (reference, test) = match (&args.reference, &args.test, &args.setting) {
        (Some(r), Some(t), None) => {
            let r = io::load_dataset(r, Some(Source::Reference))?;
            let t = io::load_dataset(t, Some(Source::Test))?;
            (r.points().clone(), t.points().clone())
        }
        (None, None, Some(name)) => {
            let setting = io::parse_setting(name)?;
            let r = sample_truncated_gaussian(
                &setting,
                0,
                args.n,
                drtest::rng::mix(global.seed, &[20]),
            )?;
            let t = sample_mixture(
                &setting,
                args.theta,
                args.n,
                drtest::rng::mix(global.seed, &[21]),
            )?;
            (r, t)
        }
        _ => bail!("provide --reference and --test, or --setting"),
    };
    let bandwidth = if args.kernel_bandwidth == "median" {
        Bandwidth::MedianHeuristic
    } else {
        Bandwidth::Fixed(
            args.kernel_bandwidth
                .parse()
                .with_context(|| format!("bad bandwidth `{}`", args.kernel_bandwidth))?,
        )
    };
    let report = mmd_test(
        &reference,
        &test,
        &KernelSpec { bandwidth },
        args.bootstrap_reps,
        global.alpha,
        drtest::rng::mix(global.seed, &[22]),
    )?;
    let doc = json!({ "test": "MMD", "report": report, "seed": global.seed });
    io::write_output(&global.out, format!("{:#}\n", doc).as_bytes())?;
    Ok(0)
}

// ------------------------------------------------------------ power-curve

#[derive(Args)]
pub struct PowerCurveArgs {
    #[arg(long, default_value = "A")]
    setting: String,
    /// Comma-separated n_train grid.
    #[arg(long, default_value = "1000,3000,10000,30000,100000")]
    n_train_grid: String,
    /// Comma-separated theta grid; overrides the log-grid flags.
    #[arg(long)]
    theta_grid: Option<String>,
    #[arg(long, default_value_t = 3e-3)]
    theta_lo: f64,
    #[arg(long, default_value_t = 0.3)]
    theta_hi: f64,
    #[arg(long, default_value_t = 12)]
    theta_points: usize,
    #[arg(long, default_value_t = 100)]
    reps: usize,
    /// Comma-separated subset of EDRT,BEDRT,MMD,OracleLR.
    #[arg(long, default_value = "EDRT,BEDRT")]
    tests: String,
    #[arg(long, default_value_t = 0.7)]
    frac_n0: f64,
    #[arg(long, default_value_t = 0.1)]
    frac_test: f64,
    #[arg(long, default_value_t = 0.5)]
    frac_part: f64,
    #[arg(long, default_value_t = 64)]
    k_max: usize,
    #[arg(long, default_value = "density-ratio")]
    criterion: String,
    #[arg(long, default_value = "simplified")]
    selection: String,
    #[arg(long, default_value_t = 200)]
    bootstrap_reps: usize,
    #[arg(long, default_value_t = 0.95)]
    quantile: f64,
    #[arg(long, default_value_t = 200)]
    mmd_bootstrap_reps: usize,
    #[arg(long, default_value_t = 512)]
    oracle_grid: usize,
}

pub fn build_plan(global: &Global, args: &PowerCurveArgs) -> Result<ExperimentPlan> {
    let mut plan = ExperimentPlan::new(io::parse_setting(&args.setting)?);
    plan.n_train_grid = io::parse_list(&args.n_train_grid, "n_train")?;
    plan.theta_grid = match &args.theta_grid {
        Some(g) => io::parse_list(g, "theta")?,
        None => log_grid(args.theta_lo, args.theta_hi, args.theta_points),
    };
    plan.reps = args.reps;
    plan.tests = parse_tests(&args.tests)?;
    plan.alpha = global.alpha;
    plan.frac_n0 = args.frac_n0;
    plan.frac_test = args.frac_test;
    plan.frac_part = args.frac_part;
    plan.k_max = args.k_max;
    plan.criterion = parse_criterion(&args.criterion)?;
    plan.selection = parse_selection(&args.selection)?;
    plan.bootstrap_reps = args.bootstrap_reps;
    plan.bootstrap_quantile = args.quantile;
    plan.mmd_bootstrap_reps = args.mmd_bootstrap_reps;
    plan.oracle_grid = args.oracle_grid;
    plan.seed = global.seed;
    Ok(plan)
}

pub fn power_curve(global: &Global, args: &PowerCurveArgs) -> Result<i32> {
    let plan = build_plan(global, args)?;
    let curve = run_plan(&plan)?;
    let format = io::parse_format(&global.format)?;
    let mut buf = Vec::new();
    emit_power_curve(&curve, format, &mut buf)?;
    io::write_output(&global.out, &buf)?;
    Ok(if curve.any_failures() { 2 } else { 0 })
}

// ------------------------------------------------------------------ slope

#[derive(Args)]
pub struct SlopeArgs {
    /// Power-curve file produced by `power-curve` (csv or json).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "BEDRT")]
    test: String,
    /// Rejection-rate band `lo,hi` restricting the regression.
    #[arg(long, default_value = "0.3,0.7")]
    band: String,
}

fn read_curve(path: &PathBuf) -> Result<PowerCurve> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        return Ok(serde_json::from_str(&text)?);
    }
    let mut rows = Vec::new();
    let mut header: Option<Vec<String>> = None;
    for line in text.lines() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        match &header {
            None => header = Some(fields.iter().map(|s| s.to_string()).collect()),
            Some(h) => {
                let get = |name: &str| -> Result<&str> {
                    let idx = h
                        .iter()
                        .position(|c| c == name)
                        .with_context(|| format!("missing column {name}"))?;
                    fields
                        .get(idx)
                        .copied()
                        .with_context(|| format!("short row `{line}`"))
                };
                let test = TestKind::parse(get("test")?)
                    .with_context(|| format!("bad test in `{line}`"))?;
                rows.push(CurveRow {
                    n_train: get("n_train")?.parse()?,
                    theta: get("theta")?.parse()?,
                    test,
                    reject_rate: get("reject_rate")?.parse()?,
                    reps: get("reps")?.parse()?,
                    failures: get("failures")?.parse()?,
                    mean_sigma2_hat: get("mean_sigma2_hat")?.parse()?,
                    mean_k_star: get("mean_k_star")?.parse()?,
                });
            }
        }
    }
    Ok(PowerCurve {
        plan: ExperimentPlan::new(drtest::data::GaussianSetting::a()),
        rows,
    })
}

pub fn slope(global: &Global, args: &SlopeArgs) -> Result<i32> {
    let curve = read_curve(&args.input)?;
    let test = TestKind::parse(&args.test).with_context(|| format!("bad test {}", args.test))?;
    let band: Vec<f64> = io::parse_list(&args.band, "band")?;
    if band.len() != 2 {
        bail!("--band needs exactly lo,hi");
    }
    let (slope, intercept) = detection_slope(&curve, test, (band[0], band[1]))?;
    let doc = json!({
        "test": test.as_str(),
        "band": band,
        "slope": slope,
        "intercept": intercept,
    });
    io::write_output(&global.out, format!("{:#}\n", doc).as_bytes())?;
    Ok(0)
}

// -------------------------------------------------------------- robustness

#[derive(Args)]
pub struct RobustnessArgs {
    #[arg(long, default_value = "0.5,0.6,0.7,0.8,0.9")]
    pi_grid: String,
    /// train_shift: training mixture fixed at 0.5, test-phase weight pi.
    /// test_shift: training weight pi, test-phase mixture at 0.5.
    #[arg(long, default_value = "train_shift")]
    direction: String,
    #[arg(long, default_value_t = 0.015)]
    theta: f64,
    #[arg(long, default_value_t = 100_000)]
    n_train: usize,
    #[arg(long, default_value_t = 20)]
    reps: usize,
    #[arg(long, default_value_t = 0.7)]
    frac_n0: f64,
    #[arg(long, default_value_t = 0.1)]
    frac_test: f64,
    #[arg(long, default_value_t = 0.5)]
    frac_part: f64,
    #[arg(long, default_value_t = 64)]
    k_max: usize,
}

pub fn robustness(global: &Global, args: &RobustnessArgs) -> Result<i32> {
    let pi_grid: Vec<f64> = io::parse_list(&args.pi_grid, "pi")?;
    let direction = ShiftDirection::parse(&args.direction)
        .with_context(|| format!("bad direction {}", args.direction))?;
    let cfg = RobustnessConfig {
        n_train: args.n_train,
        theta: args.theta,
        reps: args.reps,
        alpha: global.alpha,
        frac_n0: args.frac_n0,
        frac_test: args.frac_test,
        frac_part: args.frac_part,
        k_max: args.k_max,
        seed: global.seed,
    };
    let table = robustness_mixture_study(&pi_grid, direction, &cfg)?;
    let format = io::parse_format(&global.format)?;
    let mut buf = Vec::new();
    emit_robustness(&table, format, &mut buf)?;
    io::write_output(&global.out, &buf)?;
    let failed = table.rows.iter().any(|r| r.failures > 0);
    Ok(if failed { 2 } else { 0 })
}
