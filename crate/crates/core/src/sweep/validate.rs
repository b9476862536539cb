use super::compare::GATE_TOLERANCE;
use super::config::SweepConfig;
use super::run::{closed_trajectory, lindblad_trajectory, point_label, setup_point};
use crate::closed_form::ClosedFormOptions;
use crate::error::{Error, Result};
use crate::lindblad::excitation_number;
use crate::metrics::metric_row;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub point: String,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("validation at {}\n", self.point);
        for c in &self.checks {
            s.push_str(&format!(
                "{} {:<28} {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        s
    }
}

fn check(name: &'static str, value: f64, limit: f64) -> Check {
    Check {
        name,
        passed: value <= limit,
        detail: format!("{value:.3e} (limit {limit:.1e})"),
    }
}

/// Runs the invariant suite on the single configured grid point.
pub fn validate(cfg: &SweepConfig) -> Result<ValidationReport> {
    cfg.validate()?;
    let grid = cfg.grid();
    let &[(delta, gamma)] = grid.as_slice() else {
        return Err(Error::InvalidConfig(
            "validate needs scalar delta_over_lambda and gamma_over_lambda".into(),
        ));
    };
    let point = point_label(delta, gamma);
    let run = || -> Result<Vec<Check>> {
        let setup = setup_point(cfg, delta, gamma)?;
        let times = cfg.times();
        let mut checks = Vec::new();

        let weight = setup.init.field.norm_sqr();
        checks.push(check(
            "amplitude tail",
            1.0 - weight,
            cfg.tail_tolerance,
        ));

        let reference = lindblad_trajectory(cfg, &setup, &times)?;
        let (mut trace, mut herm, mut neg_eig) = (0.0f64, 0.0f64, 0.0f64);
        let (mut defect_lo, mut defect_hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for (rho, &t) in reference.iter().zip(&times) {
            trace = trace.max((rho.trace() - 1.0).norm());
            herm = herm.max(rho.hermiticity_defect());
            neg_eig = neg_eig.max(-rho.min_eigenvalue());
            let m = metric_row(rho, t)?;
            defect_lo = defect_lo.min(m.idempotency_defect);
            defect_hi = defect_hi.max(m.idempotency_defect);
        }
        checks.push(check("reference trace", trace, 1e-8));
        checks.push(check("reference hermiticity", herm, 1e-10));
        checks.push(check("reference positivity", neg_eig, 1e-8));
        checks.push(Check {
            name: "idempotency defect range",
            passed: defect_lo >= -1e-9 && defect_hi <= 1.0 + 1e-9,
            detail: format!("[{defect_lo:.6}, {defect_hi:.6}]"),
        });

        let corrected = closed_trajectory(&setup, &times, ClosedFormOptions::corrected())?;
        let cf_trace = corrected
            .iter()
            .map(|(rho, _)| (rho.trace().re - weight).abs())
            .fold(0.0, f64::max);
        checks.push(check("closed-form trace", cf_trace, 1e-12));
        let cf_herm = corrected
            .iter()
            .map(|(rho, _)| rho.hermiticity_defect())
            .fold(0.0, f64::max);
        checks.push(check("closed-form hermiticity", cf_herm, 1e-10));

        if gamma == 0.0 {
            let n0 = excitation_number(&reference[0]);
            let drift = reference
                .iter()
                .map(|rho| (excitation_number(rho) - n0).abs())
                .fold(0.0, f64::max);
            checks.push(check("excitation number drift", drift, 1e-8));
            let mut residual = 0.0f64;
            for ((cf, _), rf) in corrected.iter().zip(&reference) {
                residual = residual.max(cf.max_abs_diff(rf)?);
            }
            checks.push(check("closed form vs reference", residual, GATE_TOLERANCE));
        }
        Ok(checks)
    };
    let checks = run().map_err(|e| e.at_point(point.clone()))?;
    Ok(ValidationReport { point, checks })
}
