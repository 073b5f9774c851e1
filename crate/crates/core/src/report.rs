//! Report emission: power curves and robustness tables as CSV or JSON with a
//! stable layout and reproducibility metadata.

use std::io::Write;

use serde_json::json;

use crate::error::Result;
use crate::experiment::{PowerCurve, RobustnessTable};
use crate::histogram::{ThresholdContext, ThresholdedHistogram};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Some(ReportFormat::Csv),
            "json" => Some(ReportFormat::Json),
            _ => None,
        }
    }
}

/// Fixed-layout float with 6 significant digits.
pub fn sig6(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x == 0.0 {
        "0.00000e0".to_string()
    } else {
        format!("{x:.5e}")
    }
}

/// Emit a power curve. CSV carries the plan echo in a leading `#` comment
/// line; JSON embeds it as a field.
pub fn emit_power_curve<W: Write>(
    curve: &PowerCurve,
    format: ReportFormat,
    mut out: W,
) -> Result<()> {
    match format {
        ReportFormat::Csv => {
            writeln!(out, "# plan: {}", serde_json::to_string(&curve.plan)?)?;
            writeln!(
                out,
                "n_train,theta,test,reject_rate,reps,failures,mean_sigma2_hat,mean_k_star"
            )?;
            for r in &curve.rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    r.n_train,
                    sig6(r.theta),
                    r.test.as_str(),
                    sig6(r.reject_rate),
                    r.reps,
                    r.failures,
                    sig6(r.mean_sigma2_hat),
                    sig6(r.mean_k_star),
                )?;
            }
        }
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, curve)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Emit a robustness table in the same conventions.
pub fn emit_robustness<W: Write>(
    table: &RobustnessTable,
    format: ReportFormat,
    mut out: W,
) -> Result<()> {
    match format {
        ReportFormat::Csv => {
            writeln!(out, "# config: {}", serde_json::to_string(&table.config)?)?;
            writeln!(out, "# direction: {}", table.direction.as_str())?;
            writeln!(out, "pi,reject_rate_h0,reject_rate_h1,reps,failures")?;
            for r in &table.rows {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    sig6(r.pi),
                    sig6(r.reject_rate_h0),
                    sig6(r.reject_rate_h1),
                    r.reps,
                    r.failures,
                )?;
            }
        }
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, table)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// JSON view of a thresholded histogram with its threshold context.
pub fn histogram_json(hist: &ThresholdedHistogram, ctx: &ThresholdContext) -> serde_json::Value {
    json!({
        "h0": hist.h0,
        "h1": hist.h1,
        "r": hist.r,
        "omega": hist.omega.iter().map(|o| o.as_str()).collect::<Vec<_>>(),
        "sigma2_hat": hist.sigma2_hat,
        "k0": hist.k0,
        "k1": hist.k1,
        "eps0": ctx.eps0,
        "eps1": ctx.eps1,
        "u": ctx.u,
        "t": ctx.t,
    })
}
