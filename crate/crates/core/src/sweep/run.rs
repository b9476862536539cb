use rayon::prelude::*;

use super::config::{RunMode, SweepConfig};
use crate::closed_form::{joint_state, ClosedFormMode, ClosedFormOptions};
use crate::error::{Error, Result};
use crate::lindblad::{build_hamiltonian, evolve};
use crate::metrics::{metric_row, MetricRow};
use crate::model::{
    choose_truncation, coherent_amplitudes, FockTruncation, InitialState, ReducedParams,
};
use crate::DensityMatrix;

/// Which model produced a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowSource {
    ClosedPrinted,
    ClosedCorrected,
    Lindblad,
}

impl RowSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            RowSource::ClosedPrinted => "closed_printed",
            RowSource::ClosedCorrected => "closed_corrected",
            RowSource::Lindblad => "lindblad",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub delta_over_lambda: f64,
    pub gamma_over_lambda: f64,
    pub theta: f64,
    pub nbar: f64,
    pub source: RowSource,
    pub metrics: MetricRow,
    /// max |Δρ| against the other model; only set in `both` mode.
    pub residual: Option<f64>,
}

/// Everything needed to evolve one grid point.
#[derive(Debug, Clone)]
pub struct PointSetup {
    pub params: ReducedParams,
    pub trunc: FockTruncation,
    pub init: InitialState,
}

pub fn point_label(delta: f64, gamma: f64) -> String {
    format!("delta_over_lambda={delta}, gamma_over_lambda={gamma}")
}

pub fn setup_point(cfg: &SweepConfig, delta: f64, gamma: f64) -> Result<PointSetup> {
    let alpha = cfg.nbar.sqrt();
    let trunc = match cfg.n_max {
        Some(n) => FockTruncation::new(n, cfg.tail_tolerance)?,
        None => choose_truncation(alpha, cfg.tail_tolerance),
    };
    let field = coherent_amplitudes(alpha, cfg.beta_phase, &trunc)?;
    let init = InitialState::new(cfg.theta, field)?;
    let params = ReducedParams::scaled(cfg.g_over_lambda, delta, gamma)?;
    Ok(PointSetup { params, trunc, init })
}

/// Closed-form states at each time, with the trace before normalization.
pub fn closed_trajectory(
    setup: &PointSetup,
    times: &[f64],
    opts: ClosedFormOptions,
) -> Result<Vec<(DensityMatrix, f64)>> {
    times
        .iter()
        .map(|&t| {
            let s = joint_state(&setup.params, &setup.trunc, &setup.init, t, opts)?;
            Ok((s.rho, (s.raw_trace - 1.0).norm()))
        })
        .collect()
}

pub fn lindblad_trajectory(
    cfg: &SweepConfig,
    setup: &PointSetup,
    times: &[f64],
) -> Result<Vec<DensityMatrix>> {
    let h = build_hamiltonian(&setup.params, &setup.trunc);
    let rho0 = setup.init.density_matrix();
    let t_end = times.last().copied().unwrap_or(0.0);
    evolve(&h, setup.params.gamma, &rho0, t_end, &cfg.integrator_config(), times)
}

fn closed_options(cfg: &SweepConfig, mode: ClosedFormMode) -> ClosedFormOptions {
    ClosedFormOptions {
        mode,
        normalize: cfg.normalize,
        printed_phase: cfg.printed_phase,
    }
}

fn run_point(cfg: &SweepConfig, delta: f64, gamma: f64) -> Result<Vec<SweepRecord>> {
    let setup = setup_point(cfg, delta, gamma)?;
    let times = cfg.times();
    let record = |source, rho: &DensityMatrix, t, trace_error: Option<f64>, residual| {
        let mut metrics = metric_row(rho, t)?;
        if let Some(e) = trace_error {
            metrics.trace_error = e;
        }
        Ok(SweepRecord {
            delta_over_lambda: delta,
            gamma_over_lambda: gamma,
            theta: cfg.theta,
            nbar: cfg.nbar,
            source,
            metrics,
            residual,
        })
    };

    let closed = |mode, source| -> Result<Vec<SweepRecord>> {
        closed_trajectory(&setup, &times, closed_options(cfg, mode))?
            .iter()
            .zip(&times)
            .map(|((rho, err), &t)| record(source, rho, t, Some(*err), None))
            .collect()
    };

    match cfg.mode {
        RunMode::ClosedPrinted => closed(ClosedFormMode::AsPrinted, RowSource::ClosedPrinted),
        RunMode::ClosedCorrected => {
            closed(ClosedFormMode::Corrected, RowSource::ClosedCorrected)
        }
        RunMode::Lindblad => lindblad_trajectory(cfg, &setup, &times)?
            .iter()
            .zip(&times)
            .map(|(rho, &t)| record(RowSource::Lindblad, rho, t, None, None))
            .collect(),
        RunMode::Both => {
            let cf = closed_trajectory(
                &setup,
                &times,
                closed_options(cfg, ClosedFormMode::Corrected),
            )?;
            let lb = lindblad_trajectory(cfg, &setup, &times)?;
            let mut out = Vec::with_capacity(2 * times.len());
            for (((rho_cf, err), rho_lb), &t) in cf.iter().zip(&lb).zip(&times) {
                let r = rho_cf.max_abs_diff(rho_lb)?;
                out.push(record(RowSource::ClosedCorrected, rho_cf, t, Some(*err), Some(r))?);
                out.push(record(RowSource::Lindblad, rho_lb, t, None, Some(r))?);
            }
            Ok(out)
        }
    }
}

/// Runs `f` on every grid point inside a pool of `cfg.workers` threads,
/// keeping grid order. Errors are tagged with the failing point.
pub(crate) fn par_points<T, F>(cfg: &SweepConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64, f64) -> Result<T> + Sync,
{
    cfg.validate()?;
    let grid = cfg.grid();
    if grid.is_empty() {
        return Err(Error::NoGridPoints);
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.workers {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    pool.install(|| {
        grid.par_iter()
            .map(|&(d, g)| f(d, g).map_err(|e| e.at_point(point_label(d, g))))
            .collect()
    })
}

/// Evaluates every grid point. Rows are ordered by grid point, then time,
/// then source, regardless of the worker count.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    let per_point = par_points(cfg, |d, g| run_point(cfg, d, g))?;
    Ok(per_point.into_iter().flatten().collect())
}
