//! Truncated Gaussians on the unit cube and the simulation settings built
//! from them.

use std::f64::consts::{PI, SQRT_2};

use libm::{erf, erfc};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::PointMatrix;
use crate::error::{Error, Result};
use crate::rng;

/// P(a <= Z <= b) for a standard normal, stable deep in either tail.
pub fn std_normal_interval(a: f64, b: f64) -> f64 {
    debug_assert!(a <= b);
    if a >= 0.0 {
        0.5 * (erfc(a / SQRT_2) - erfc(b / SQRT_2))
    } else if b <= 0.0 {
        0.5 * (erfc(-b / SQRT_2) - erfc(-a / SQRT_2))
    } else {
        0.5 * (erf(b / SQRT_2) + erf(-a / SQRT_2))
    }
}

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Product of independent normals conditioned on the unit cube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedGaussian {
    mean: Vec<f64>,
    sd: Vec<f64>,
    axis_mass: Vec<f64>,
}

impl TruncatedGaussian {
    /// `var_diag` holds the per-axis variances of the untruncated Gaussian.
    pub fn new(mean: Vec<f64>, var_diag: Vec<f64>) -> Result<Self> {
        if mean.len() != var_diag.len() || mean.is_empty() {
            return Err(Error::InvalidParameter(
                "mean and variance vectors must have equal positive length".into(),
            ));
        }
        if mean.iter().any(|m| !(0.0 < *m && *m < 1.0)) {
            return Err(Error::InvalidParameter(
                "means must lie strictly inside the unit cube".into(),
            ));
        }
        if var_diag.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidParameter("variances must be positive".into()));
        }
        let sd: Vec<f64> = var_diag.iter().map(|v| v.sqrt()).collect();
        let axis_mass = mean
            .iter()
            .zip(&sd)
            .map(|(m, s)| std_normal_interval((0.0 - m) / s, (1.0 - m) / s))
            .collect();
        Ok(TruncatedGaussian { mean, sd, axis_mass })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Density at `x` in the unit cube (0 outside).
    pub fn pdf(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim());
        let mut p = 1.0;
        for j in 0..self.dim() {
            if !(0.0..=1.0).contains(&x[j]) {
                return 0.0;
            }
            let z = (x[j] - self.mean[j]) / self.sd[j];
            p *= std_normal_pdf(z) / (self.sd[j] * self.axis_mass[j]);
        }
        p
    }

    /// Exact probability of `[lo, hi]` along one axis.
    pub fn axis_interval_prob(&self, axis: usize, lo: f64, hi: f64) -> f64 {
        let lo = lo.max(0.0);
        let hi = hi.min(1.0);
        if hi <= lo {
            return 0.0;
        }
        let m = self.mean[axis];
        let s = self.sd[axis];
        std_normal_interval((lo - m) / s, (hi - m) / s) / self.axis_mass[axis]
    }

    /// Exact probability of an axis-aligned rectangle.
    pub fn rect_prob(&self, lo: &[f64], hi: &[f64]) -> f64 {
        (0..self.dim())
            .map(|j| self.axis_interval_prob(j, lo[j], hi[j]))
            .product()
    }

    /// Marginal CDF along one axis.
    pub fn axis_cdf(&self, axis: usize, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else {
            self.axis_interval_prob(axis, 0.0, x)
        }
    }

    /// Rejection sampler: propose from the untruncated Gaussian, keep points
    /// inside the cube. Fails if the estimated acceptance probability drops
    /// below 1e-6 over the first 1e6 proposals.
    pub fn sample(&self, count: usize, rng: &mut impl Rng) -> Result<PointMatrix> {
        let d = self.dim();
        let mut out = PointMatrix::with_capacity(d, count);
        let mut row = vec![0.0; d];
        let mut proposals: u64 = 0;
        let mut accepted: u64 = 0;
        while out.n() < count {
            proposals += 1;
            let mut ok = true;
            // one proposal always consumes d normals, keeping the RNG stream
            // position a function of the proposal count alone
            for j in 0..d {
                let z: f64 = rng.sample(StandardNormal);
                row[j] = self.mean[j] + self.sd[j] * z;
                if !(0.0..=1.0).contains(&row[j]) {
                    ok = false;
                }
            }
            if ok {
                accepted += 1;
                out.push(&row)?;
            }
            if proposals == 1_000_000 && accepted == 0 {
                return Err(Error::PathologicalSetting);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SettingLabel {
    A,
    B,
    C,
    Custom,
}

impl std::fmt::Display for SettingLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SettingLabel::A => write!(f, "A"),
            SettingLabel::B => write!(f, "B"),
            SettingLabel::C => write!(f, "C"),
            SettingLabel::Custom => write!(f, "custom"),
        }
    }
}

/// A reference/contaminant pair of truncated Gaussians on `[0,1]^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianSetting {
    pub label: SettingLabel,
    pub mean0: Vec<f64>,
    pub mean1: Vec<f64>,
    pub cov_diag: Vec<f64>,
}

impl GaussianSetting {
    pub fn custom(mean0: Vec<f64>, mean1: Vec<f64>, cov_diag: Vec<f64>) -> Result<Self> {
        // validate through the component constructor
        TruncatedGaussian::new(mean0.clone(), cov_diag.clone())?;
        TruncatedGaussian::new(mean1.clone(), cov_diag.clone())?;
        Ok(GaussianSetting {
            label: SettingLabel::Custom,
            mean0,
            mean1,
            cov_diag,
        })
    }

    fn standard(label: SettingLabel, m0: f64, m1: f64) -> Self {
        GaussianSetting {
            label,
            mean0: vec![m0, m0],
            mean1: vec![m1, m1],
            cov_diag: vec![0.01, 0.01],
        }
    }

    /// Well-separated pair: means (0.3, 0.3) and (0.7, 0.7).
    pub fn a() -> Self {
        Self::standard(SettingLabel::A, 0.3, 0.7)
    }

    /// Intermediate pair: means (0.4, 0.4) and (0.6, 0.6).
    pub fn b() -> Self {
        Self::standard(SettingLabel::B, 0.4, 0.6)
    }

    /// Hard pair: means (0.4, 0.4) and (0.5, 0.5).
    pub fn c() -> Self {
        Self::standard(SettingLabel::C, 0.4, 0.5)
    }

    /// Null geometry: contaminant equal to the reference.
    pub fn null() -> Self {
        let mut s = Self::standard(SettingLabel::Custom, 0.5, 0.5);
        s.mean0 = vec![0.5, 0.5];
        s.mean1 = vec![0.5, 0.5];
        s
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "A" | "a" => Some(Self::a()),
            "B" | "b" => Some(Self::b()),
            "C" | "c" => Some(Self::c()),
            "null" => Some(Self::null()),
            _ => None,
        }
    }

    pub fn d(&self) -> usize {
        self.mean0.len()
    }

    pub fn f0(&self) -> TruncatedGaussian {
        TruncatedGaussian::new(self.mean0.clone(), self.cov_diag.clone())
            .expect("setting invariants checked at construction")
    }

    pub fn f1(&self) -> TruncatedGaussian {
        TruncatedGaussian::new(self.mean1.clone(), self.cov_diag.clone())
            .expect("setting invariants checked at construction")
    }
}

/// Draw `count` i.i.d. points from one component of a setting.
pub fn sample_truncated_gaussian(
    setting: &GaussianSetting,
    which: u8,
    count: usize,
    seed: u64,
) -> Result<PointMatrix> {
    let g = match which {
        0 => setting.f0(),
        1 => setting.f1(),
        other => {
            return Err(Error::InvalidParameter(format!(
                "component must be 0 or 1, got {other}"
            )))
        }
    };
    let mut r = rng::rng_from(seed);
    g.sample(count, &mut r)
}

/// Mixture draw plus the per-point contaminant indicators.
pub fn sample_mixture_labeled(
    setting: &GaussianSetting,
    theta: f64,
    n: usize,
    seed: u64,
) -> Result<(PointMatrix, Vec<bool>)> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidParameter(format!(
            "theta must be in [0,1], got {theta}"
        )));
    }
    let f0 = setting.f0();
    let f1 = setting.f1();
    let mut r = rng::rng_from(seed);
    let mut out = PointMatrix::with_capacity(setting.d(), n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let from_f1 = r.gen::<f64>() < theta;
        let row = if from_f1 {
            f1.sample(1, &mut r)?
        } else {
            f0.sample(1, &mut r)?
        };
        out.push(row.row(0))?;
        labels.push(from_f1);
    }
    Ok((out, labels))
}

/// Each point drawn from f1 with probability `theta`, else from f0.
pub fn sample_mixture(
    setting: &GaussianSetting,
    theta: f64,
    n: usize,
    seed: u64,
) -> Result<PointMatrix> {
    sample_mixture_labeled(setting, theta, n, seed).map(|(m, _)| m)
}
