//! Thresholded histogram density-ratio estimation on a fixed partition:
//! thresholds eps0/eps1, omega-set classification, floored estimates, ratio
//! vector, and the estimated signal sigma2_hat; plus the population signal by
//! quadrature or exact Gaussian bin integrals.

use serde::{Deserialize, Serialize};

use crate::data::TruncatedGaussian;
use crate::error::{Error, Result};
use crate::partition::{BinTable, PartitionTree};

/// Level, tail parameters, sample sizes, and the derived thresholds.
///
/// eps0 = max(3u/n0, t/n); eps1 = sqrt(3u/n1). Logs are natural.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdContext {
    pub alpha: f64,
    pub u: f64,
    pub t: f64,
    pub n: usize,
    pub n0: usize,
    pub n1: usize,
    pub k: usize,
    pub eps0: f64,
    pub eps1: f64,
    pub validity: ContextValidity,
}

/// The test hypotheses checked at construction: 3 eps0 <= eps1 <= 1 and
/// n1 <= n0. Invalid contexts are allowed but flagged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextValidity {
    pub eps_ordering: bool,
    pub eps1_le_one: bool,
    pub n1_le_n0: bool,
}

impl ContextValidity {
    pub fn all(&self) -> bool {
        self.eps_ordering && self.eps1_le_one && self.n1_le_n0
    }

    pub fn violation(&self) -> Option<&'static str> {
        if !self.eps_ordering {
            Some("3*eps0 <= eps1")
        } else if !self.eps1_le_one {
            Some("eps1 <= 1")
        } else if !self.n1_le_n0 {
            Some("n1 <= n0")
        } else {
            None
        }
    }
}

/// Build a context with u = ln(4K/alpha) and t = ln(2/alpha) unless
/// overridden. Partition-sequence callers pass u = ln(8*K_max/alpha) so the
/// thresholds stay constant across the nested sequence.
pub fn make_context(
    alpha: f64,
    k: usize,
    n: usize,
    n0: usize,
    n1: usize,
    u_override: Option<f64>,
    t_override: Option<f64>,
) -> ThresholdContext {
    assert!(alpha > 0.0 && alpha < 1.0, "alpha must be in (0,1)");
    assert!(k >= 1 && n >= 1 && n0 >= 1 && n1 >= 1, "sizes must be >= 1");
    let u = u_override.unwrap_or_else(|| (4.0 * k as f64 / alpha).ln());
    let t = t_override.unwrap_or_else(|| (2.0 / alpha).ln());
    let eps0 = (3.0 * u / n0 as f64).max(t / n as f64);
    let eps1 = (3.0 * u / n1 as f64).sqrt();
    let validity = ContextValidity {
        eps_ordering: 3.0 * eps0 <= eps1,
        eps1_le_one: eps1 <= 1.0,
        n1_le_n0: n1 <= n0,
    };
    ThresholdContext {
        alpha,
        u,
        t,
        n,
        n0,
        n1,
        k,
        eps0,
        eps1,
        validity,
    }
}

impl ThresholdContext {
    /// Same parameters, different bin count. u and t are kept as-is, so for
    /// overridden u the thresholds do not move.
    pub fn with_k(&self, k: usize) -> ThresholdContext {
        make_context(self.alpha, k, self.n, self.n0, self.n1, Some(self.u), Some(self.t))
    }
}

/// Per-bin classification of which estimates get floored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OmegaClass {
    /// Reference frequency below eps0 while the contaminant is informative:
    /// h0 floored at 3 eps0.
    Omega0,
    /// Contaminant frequency below eps1 while the reference is well above:
    /// h1 floored at 3 eps1.
    Omega1,
    /// Both frequencies below eps1: both floored at 3 eps1 and the ratio is
    /// pinned to 1.
    Omega01,
    /// Raw frequencies on both sides.
    Plain,
}

impl OmegaClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            OmegaClass::Omega0 => "Omega0",
            OmegaClass::Omega1 => "Omega1",
            OmegaClass::Omega01 => "Omega01",
            OmegaClass::Plain => "Plain",
        }
    }
}

/// Classify one bin and produce its thresholded estimates (h0, h1).
///
/// Ties (frequency exactly equal to a threshold) go to the floored side.
pub fn bin_estimate(ctx: &ThresholdContext, n0k: u64, n1k: u64) -> (f64, f64, OmegaClass) {
    let f0 = n0k as f64 / ctx.n0 as f64;
    let f1 = n1k as f64 / ctx.n1 as f64;
    if f1 > ctx.eps1 {
        if f0 <= ctx.eps0 {
            (3.0 * ctx.eps0, f1, OmegaClass::Omega0)
        } else {
            (f0, f1, OmegaClass::Plain)
        }
    } else if f0 <= ctx.eps1 {
        (3.0 * ctx.eps1, 3.0 * ctx.eps1, OmegaClass::Omega01)
    } else {
        (f0, 3.0 * ctx.eps1, OmegaClass::Omega1)
    }
}

/// Signal contribution (r - 1)^2 h0 of a single bin.
pub fn bin_signal(ctx: &ThresholdContext, n0k: u64, n1k: u64) -> f64 {
    let (h0, h1, omega) = bin_estimate(ctx, n0k, n1k);
    if omega == OmegaClass::Omega01 {
        return 0.0;
    }
    let r = h1 / h0;
    (r - 1.0) * (r - 1.0) * h0
}

/// Thresholded estimates, ratios, omega labels, and the estimated signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdedHistogram {
    pub h0: Vec<f64>,
    pub h1: Vec<f64>,
    pub r: Vec<f64>,
    pub omega: Vec<OmegaClass>,
    pub sigma2_hat: f64,
    /// |Omega0|
    pub k0: usize,
    /// |Omega1| + |Omega01|
    pub k1: usize,
}

impl ThresholdedHistogram {
    pub fn k(&self) -> usize {
        self.h0.len()
    }

    pub fn max_abs_r_minus_1(&self) -> f64 {
        self.r
            .iter()
            .map(|r| (r - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Thresholded histogram estimation for a count table.
pub fn estimate(ctx: &ThresholdContext, bins: &BinTable) -> Result<ThresholdedHistogram> {
    if bins.k() != ctx.k {
        return Err(Error::BinCountMismatch {
            expected: ctx.k,
            got: bins.k(),
        });
    }
    let k = bins.k();
    let mut h0 = Vec::with_capacity(k);
    let mut h1 = Vec::with_capacity(k);
    let mut r = Vec::with_capacity(k);
    let mut omega = Vec::with_capacity(k);
    let mut sigma2 = 0.0;
    let mut k0 = 0;
    let mut k1 = 0;
    for i in 0..k {
        let (h0i, h1i, om) = bin_estimate(ctx, bins.n0[i], bins.n1[i]);
        debug_assert!(h0i > 0.0, "thresholds keep h0 strictly positive");
        let ri = if om == OmegaClass::Omega01 { 1.0 } else { h1i / h0i };
        sigma2 += (ri - 1.0) * (ri - 1.0) * h0i;
        match om {
            OmegaClass::Omega0 => k0 += 1,
            OmegaClass::Omega1 | OmegaClass::Omega01 => k1 += 1,
            OmegaClass::Plain => {}
        }
        h0.push(h0i);
        h1.push(h1i);
        r.push(ri);
        omega.push(om);
    }
    Ok(ThresholdedHistogram {
        h0,
        h1,
        r,
        omega,
        sigma2_hat: sigma2,
        k0,
        k1,
    })
}

/// A probability density on the unit cube.
pub trait Density {
    fn dim(&self) -> usize;
    fn pdf(&self, x: &[f64]) -> f64;
    /// Exact probability of an axis-aligned rectangle, when a closed form is
    /// available.
    fn rect_prob(&self, lo: &[f64], hi: &[f64]) -> Option<f64> {
        let _ = (lo, hi);
        None
    }
}

impl Density for TruncatedGaussian {
    fn dim(&self) -> usize {
        TruncatedGaussian::dim(self)
    }

    fn pdf(&self, x: &[f64]) -> f64 {
        TruncatedGaussian::pdf(self, x)
    }

    fn rect_prob(&self, lo: &[f64], hi: &[f64]) -> Option<f64> {
        Some(TruncatedGaussian::rect_prob(self, lo, hi))
    }
}

/// Density wrapper for closures (quadrature-only).
pub struct FnDensity<F: Fn(&[f64]) -> f64> {
    pub d: usize,
    pub f: F,
}

impl<F: Fn(&[f64]) -> f64> Density for FnDensity<F> {
    fn dim(&self) -> usize {
        self.d
    }

    fn pdf(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// Sum f(center) * cell_volume over a midpoint tensor grid of the box.
fn midpoint_sum(
    lo: &[f64],
    hi: &[f64],
    per_axis: &[usize],
    mut f: impl FnMut(&[f64]) -> f64,
) -> f64 {
    let d = lo.len();
    let steps: Vec<f64> = (0..d).map(|j| (hi[j] - lo[j]) / per_axis[j] as f64).collect();
    let cell: f64 = steps.iter().product();
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    let mut total = 0.0;
    loop {
        for j in 0..d {
            x[j] = lo[j] + (idx[j] as f64 + 0.5) * steps[j];
        }
        total += f(&x);
        // odometer
        let mut j = 0;
        loop {
            idx[j] += 1;
            if idx[j] < per_axis[j] {
                break;
            }
            idx[j] = 0;
            j += 1;
            if j == d {
                return total * cell;
            }
        }
    }
}

fn quadrature_rect_prob(f: &dyn Density, lo: &[f64], hi: &[f64], grid: usize) -> f64 {
    let per_axis: Vec<usize> = lo
        .iter()
        .zip(hi)
        .map(|(a, b)| ((grid as f64 * (b - a)).ceil() as usize).max(1))
        .collect();
    midpoint_sum(lo, hi, &per_axis, |x| f.pdf(x))
}

/// Population signal of the testing problem.
///
/// Without a tree this is the integral of (f1/f0 - 1)^2 f0 over the cube by
/// midpoint quadrature with `grid` nodes per axis. With a tree it is the
/// discretized signal of the partition, computed from per-bin probabilities
/// (closed-form when the density provides them, quadrature otherwise).
pub fn population_signal(
    f0: &dyn Density,
    f1: &dyn Density,
    tree: Option<&PartitionTree>,
    grid: usize,
) -> Result<f64> {
    assert!(grid >= 1);
    let d = f0.dim();
    if f1.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: f1.dim(),
        });
    }
    let value = match tree {
        None => {
            let lo = vec![0.0; d];
            let hi = vec![1.0; d];
            midpoint_sum(&lo, &hi, &vec![grid; d], |x| {
                let p0 = f0.pdf(x);
                let p1 = f1.pdf(x);
                let q = p1 / p0 - 1.0;
                q * q * p0
            })
        }
        Some(tree) => {
            if tree.d() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: tree.d(),
                });
            }
            let mut total = 0.0;
            for bin in 0..tree.k() {
                let rect = tree.bin_extent(bin)?;
                let p0 = f0
                    .rect_prob(&rect.lo, &rect.hi)
                    .unwrap_or_else(|| quadrature_rect_prob(f0, &rect.lo, &rect.hi, grid));
                let p1 = f1
                    .rect_prob(&rect.lo, &rect.hi)
                    .unwrap_or_else(|| quadrature_rect_prob(f1, &rect.lo, &rect.hi, grid));
                if !(p0 > 0.0) {
                    return Err(Error::QuadratureNonFinite);
                }
                let q = p1 / p0 - 1.0;
                total += q * q * p0;
            }
            total
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::QuadratureNonFinite)
    }
}
