use std::fmt::Write as _;

use super::config::{RunMode, SweepConfig};
use super::run::{closed_trajectory, lindblad_trajectory, par_points, setup_point};
use crate::closed_form::{ClosedFormMode, ClosedFormOptions};
use crate::error::{Error, Result};
use crate::metrics::metric_row;

/// Closed-form vs reference agreement required at γ = 0.
pub const GATE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct PointComparison {
    pub delta_over_lambda: f64,
    pub gamma_over_lambda: f64,
    /// max over time of max |ρ_closed − ρ_ref|, corrected closed form.
    pub max_residual: f64,
    /// Time at which `max_residual` occurs.
    pub worst_t: f64,
    /// max over time of |1 − Tr ρ| for the unnormalized printed form.
    pub printed_trace_deficit: f64,
    pub max_d_inversion: f64,
    pub max_d_defect: f64,
    pub max_d_negativity: f64,
}

impl PointComparison {
    pub fn gated(&self) -> bool {
        self.gamma_over_lambda == 0.0
    }

    pub fn passes_gate(&self) -> bool {
        !self.gated() || self.max_residual <= GATE_TOLERANCE
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub points: Vec<PointComparison>,
}

impl CompareReport {
    pub fn gate_passed(&self) -> bool {
        self.points.iter().all(PointComparison::passes_gate)
    }

    /// Points sorted by descending residual.
    pub fn worst(&self, k: usize) -> Vec<&PointComparison> {
        let mut v: Vec<_> = self.points.iter().collect();
        v.sort_by(|a, b| b.max_residual.total_cmp(&a.max_residual));
        v.truncate(k);
        v
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "delta_over_lambda,gamma_over_lambda,max_residual,worst_t,printed_trace_deficit,\
max_d_inversion,max_d_defect,max_d_negativity,gate\n",
        );
        for p in &self.points {
            let gate = match (p.gated(), p.passes_gate()) {
                (false, _) => "",
                (true, true) => "pass",
                (true, false) => "fail",
            };
            let _ = writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{gate}",
                p.delta_over_lambda,
                p.gamma_over_lambda,
                p.max_residual,
                p.worst_t,
                p.printed_trace_deficit,
                p.max_d_inversion,
                p.max_d_defect,
                p.max_d_negativity,
            );
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:>14} {:>14} {:>12} {:>8} {:>14} {:>11} {:>11} {:>11}",
            "delta/lambda",
            "gamma/lambda",
            "max|drho|",
            "at t",
            "printed 1-Tr",
            "dW",
            "dDefect",
            "dNeg"
        );
        for p in &self.points {
            let _ = writeln!(
                s,
                "{:>14.6} {:>14.6} {:>12.3e} {:>8.3} {:>14.3e} {:>11.3e} {:>11.3e} {:>11.3e}{}",
                p.delta_over_lambda,
                p.gamma_over_lambda,
                p.max_residual,
                p.worst_t,
                p.printed_trace_deficit,
                p.max_d_inversion,
                p.max_d_defect,
                p.max_d_negativity,
                if p.passes_gate() { "" } else { "  FAIL" },
            );
        }
        let _ = writeln!(s, "worst offenders:");
        for p in self.worst(3) {
            let _ = writeln!(
                s,
                "  delta/lambda={} gamma/lambda={} residual={:.3e}",
                p.delta_over_lambda, p.gamma_over_lambda, p.max_residual
            );
        }
        let gated = self.points.iter().filter(|p| p.gated()).count();
        let _ = writeln!(
            s,
            "gate (gamma=0 residual <= {GATE_TOLERANCE:e}, {gated} points): {}",
            if self.gate_passed() { "PASS" } else { "FAIL" }
        );
        s
    }
}

fn compare_point(cfg: &SweepConfig, delta: f64, gamma: f64) -> Result<PointComparison> {
    let setup = setup_point(cfg, delta, gamma)?;
    let times = cfg.times();
    let corrected = closed_trajectory(&setup, &times, ClosedFormOptions::corrected())?;
    let printed = closed_trajectory(
        &setup,
        &times,
        ClosedFormOptions {
            mode: ClosedFormMode::AsPrinted,
            normalize: false,
            printed_phase: cfg.printed_phase,
        },
    )?;
    let reference = lindblad_trajectory(cfg, &setup, &times)?;

    let mut out = PointComparison {
        delta_over_lambda: delta,
        gamma_over_lambda: gamma,
        max_residual: 0.0,
        worst_t: 0.0,
        printed_trace_deficit: 0.0,
        max_d_inversion: 0.0,
        max_d_defect: 0.0,
        max_d_negativity: 0.0,
    };
    for (((cf, _), (_, printed_err)), (rf, &t)) in
        corrected.iter().zip(&printed).zip(reference.iter().zip(&times))
    {
        let r = cf.max_abs_diff(rf)?;
        if r > out.max_residual {
            out.max_residual = r;
            out.worst_t = t;
        }
        out.printed_trace_deficit = out.printed_trace_deficit.max(*printed_err);
        let (a, b) = (metric_row(cf, t)?, metric_row(rf, t)?);
        out.max_d_inversion = out.max_d_inversion.max((a.inversion - b.inversion).abs());
        out.max_d_defect = out
            .max_d_defect
            .max((a.idempotency_defect - b.idempotency_defect).abs());
        out.max_d_negativity = out.max_d_negativity.max((a.negativity - b.negativity).abs());
    }
    Ok(out)
}

/// Compares the corrected closed form against the master-equation
/// reference on every grid point, and reports the printed form's trace loss.
pub fn compare_report(cfg: &SweepConfig) -> Result<CompareReport> {
    if cfg.mode != RunMode::Both {
        return Err(Error::InvalidConfig(format!(
            "compare needs mode = both, got {}",
            cfg.mode.as_str()
        )));
    }
    let points = par_points(cfg, |d, g| compare_point(cfg, d, g))?;
    Ok(CompareReport { points })
}
