//! Coordinate-wise preprocessing onto the unit cube.
//!
//! Per coordinate: subtract the mean, apply arcsinh, then rescale affinely so
//! the minimum maps to 0 and the maximum to 1. arcsinh is the usual variance-
//! stabilizing transform for cytometry-style measurements and is strictly
//! increasing, so the per-coordinate ordering of points is preserved.

use crate::data::LabeledDataset;
use crate::error::{Error, Result};

pub fn preprocess(raw: &LabeledDataset) -> Result<LabeledDataset> {
    let n = raw.n();
    let d = raw.d();
    if n == 0 {
        return Err(Error::NoRows);
    }
    let mut out = raw.clone();
    for j in 0..d {
        let mean = (0..n).map(|i| raw.points().coord(i, j)).sum::<f64>() / n as f64;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let y = (raw.points().coord(i, j) - mean).asinh();
            *out.points_mut().coord_mut(i, j) = y;
            lo = lo.min(y);
            hi = hi.max(y);
        }
        if !(hi > lo) {
            return Err(Error::DegenerateAxis { axis: j });
        }
        let scale = hi - lo;
        for i in 0..n {
            let y = out.points().coord(i, j);
            *out.points_mut().coord_mut(i, j) = ((y - lo) / scale).clamp(0.0, 1.0);
        }
    }
    Ok(out)
}
