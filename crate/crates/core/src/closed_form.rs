//! Analytical dressed-state solution for the joint density matrix.
//!
//! Two variants are provided:
//!
//! * [`ClosedFormMode::AsPrinted`] evaluates the uncorrected expression term
//!   for term: a global `exp(−γt/2)`, population coefficients
//!   `cos μ_nm t ± cos μ'_nm t` without the factor ½, cross terms
//!   `∓(i/2) sin μ_nm t`, and the phase factors `exp(∓iβ₁₂)`. It is neither
//!   trace preserving nor Hermitian and is kept for comparison and
//!   diagnosis.
//! * [`ClosedFormMode::Corrected`] uses the generalized Rabi amplitudes of
//!   each excitation doublet, `ρ = Σ b_n b_m* e^{−γt(n−m)²} |v_n⟩⟨v_m|`,
//!   which is exact at γ = 0 and trace preserving for all γ.
//!
//! The Hamiltonian convention matches [`crate::lindblad::build_hamiltonian`]:
//! `⟨n,e|H|n+1,g⟩ = −i g √(n+1)`, diagonal `±δ`, rotating frame at the
//! cavity frequency. With that convention the |e⟩ start evolves inside the
//! doublet {|n,e⟩, |n+1,g⟩} as
//!
//! ```text
//! |v_n(t)⟩ = (cos μt − i δ sin μt / μ) |n,e⟩ + g√(n+1) sin μt / μ |n+1,g⟩
//! ```
//!
//! and the |g⟩ start inside {|n,g⟩, |n−1,e⟩} as
//!
//! ```text
//! |u_n(t)⟩ = (cos νt + i δ sin νt / ν) |n,g⟩ − g√n sin νt / ν |n−1,e⟩
//! ```
//!
//! The top level |n_max,e⟩ has no partner inside the truncated space and only
//! picks up the phase `e^{−iδt}`, mirroring the truncated Hamiltonian.

use crate::density::{Basis, DensityMatrix, Qubit};
use crate::error::{Error, Result};
use crate::model::{rabi_frequency, FockTruncation, InitialState, ReducedParams};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClosedFormMode {
    AsPrinted,
    Corrected,
}

/// Reading of the phase β₁₂ = β − β* in the uncorrected form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PrintedPhase {
    /// β is the real phase of α, so β₁₂ = 0 and the factors are inert.
    #[default]
    RealPhase,
    /// β₁₂ read as arg α − arg α* = 2β.
    ConjugateDifference,
}

impl PrintedPhase {
    fn beta12(self, beta: f64) -> f64 {
        match self {
            PrintedPhase::RealPhase => 0.0,
            PrintedPhase::ConjugateDifference => 2.0 * beta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormOptions {
    pub mode: ClosedFormMode,
    /// Divide by the trace when it deviates from 1 by more than 1e−12.
    pub normalize: bool,
    /// Only used by [`ClosedFormMode::AsPrinted`].
    pub printed_phase: PrintedPhase,
}

impl ClosedFormOptions {
    pub fn corrected() -> Self {
        Self {
            mode: ClosedFormMode::Corrected,
            normalize: false,
            printed_phase: PrintedPhase::RealPhase,
        }
    }

    pub fn as_printed(normalize: bool) -> Self {
        Self {
            mode: ClosedFormMode::AsPrinted,
            normalize,
            printed_phase: PrintedPhase::RealPhase,
        }
    }
}

/// A closed-form state together with its trace before normalization.
#[derive(Debug, Clone)]
pub struct ClosedFormState {
    pub rho: DensityMatrix,
    pub raw_trace: C64,
    pub normalized: bool,
}

impl ClosedFormState {
    pub fn trace_deficit(&self) -> f64 {
        1.0 - self.raw_trace.re
    }
}

const NORMALIZE_THRESHOLD: f64 = 1e-12;

/// Amplitudes of one excitation doublet at time t:
/// `(coefficient on the starting level, coefficient on its partner)`.
/// `sign = −1` for an |e⟩ start, `+1` for a |g⟩ start.
fn doublet(coupling: f64, delta: f64, t: f64, sign: f64) -> (C64, f64) {
    let mu = delta.hypot(coupling);
    let s = if mu > 0.0 { (mu * t).sin() / mu } else { t };
    let stay = C64::new((mu * t).cos(), sign * delta * s);
    (stay, coupling * s)
}

/// One ladder state per Fock amplitude, stored sparsely as
/// (index, amplitude) pairs.
type Ladder = [(usize, C64); 2];

fn excited_ladders(params: &ReducedParams, basis: Basis, t: f64) -> Vec<Ladder> {
    (0..=basis.n_max)
        .map(|n| {
            let coupling = if n < basis.n_max {
                params.g * ((n + 1) as f64).sqrt()
            } else {
                0.0
            };
            let (stay, moved) = doublet(coupling, params.delta, t, -1.0);
            let partner = if n < basis.n_max {
                basis.index(n + 1, Qubit::Ground)
            } else {
                basis.index(n, Qubit::Excited)
            };
            [
                (basis.index(n, Qubit::Excited), stay),
                (partner, C64::new(moved, 0.0)),
            ]
        })
        .collect()
}

fn ground_ladders(params: &ReducedParams, basis: Basis, t: f64) -> Vec<Ladder> {
    (0..=basis.n_max)
        .map(|n| {
            let coupling = params.g * (n as f64).sqrt();
            let (stay, moved) = doublet(coupling, params.delta, t, 1.0);
            let partner = if n > 0 {
                basis.index(n - 1, Qubit::Excited)
            } else {
                basis.index(0, Qubit::Ground)
            };
            [
                (basis.index(n, Qubit::Ground), stay),
                (partner, C64::new(-moved, 0.0)),
            ]
        })
        .collect()
}

fn accumulate_ladders(
    out: &mut ndarray::Array2<C64>,
    ladders: &[Ladder],
    b: &[C64],
    weight: f64,
    gamma_t: f64,
) {
    let n_levels = ladders.len();
    for n in 0..n_levels {
        let bn = b[n] * weight;
        if bn == C64::new(0.0, 0.0) {
            continue;
        }
        for m in 0..n_levels {
            let diff = n as f64 - m as f64;
            let coef = bn * b[m].conj() * (-gamma_t * diff * diff).exp();
            if coef == C64::new(0.0, 0.0) {
                continue;
            }
            for &(i, a) in &ladders[n] {
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let ca = coef * a;
                for &(j, c) in &ladders[m] {
                    out[[i, j]] += ca * c.conj();
                }
            }
        }
    }
}

fn corrected(params: &ReducedParams, init: &InitialState, basis: Basis, t: f64) -> DensityMatrix {
    let mut rho = DensityMatrix::zeros(basis);
    let b = &init.field.amplitudes;
    let gamma_t = params.gamma * t;
    let we = init.excited_weight();
    let wg = init.ground_weight();
    if we > 0.0 {
        let ladders = excited_ladders(params, basis, t);
        accumulate_ladders(rho.matrix_mut(), &ladders, b, we, gamma_t);
    }
    if wg > 0.0 {
        let ladders = ground_ladders(params, basis, t);
        accumulate_ladders(rho.matrix_mut(), &ladders, b, wg, gamma_t);
    }
    // The two triangles accumulate products in different orders; averaging
    // with the adjoint makes entry(j,k) = conj(entry(k,j)) hold bitwise.
    let m = rho.matrix_mut();
    let d = m.nrows();
    for j in 0..d {
        for k in j..d {
            let v = (m[[j, k]] + m[[k, j]].conj()) * 0.5;
            m[[j, k]] = v;
            m[[k, j]] = v.conj();
        }
    }
    rho
}

fn as_printed(
    params: &ReducedParams,
    init: &InitialState,
    basis: Basis,
    t: f64,
    phase: PrintedPhase,
) -> DensityMatrix {
    let mut rho = DensityMatrix::zeros(basis);
    let out = rho.matrix_mut();
    let b = &init.field.amplitudes;
    let n_max = basis.n_max;
    let gamma = params.gamma;
    let beta12 = phase.beta12(init.field.beta_phase);
    let minus = C64::from_polar(1.0, -beta12);
    let plus = C64::from_polar(1.0, beta12);
    let half_i = C64::new(0.0, 0.5);
    let global = (-0.5 * gamma * t).exp();

    // |e⟩ start, printed verbatim.
    let we = init.excited_weight();
    if we > 0.0 {
        let mu: Vec<f64> = (0..=n_max).map(|n| rabi_frequency(params, n)).collect();
        for n in 0..=n_max {
            for m in 0..=n_max {
                let diff = n as f64 - m as f64;
                let coef = b[n] * b[m].conj() * (we * global * (-gamma * t * diff * diff).exp());
                let a = (mu[n] - mu[m]) * t;
                let ap = (mu[n] + mu[m]) * t;
                let ne = basis.index(n, Qubit::Excited);
                let me = basis.index(m, Qubit::Excited);
                out[[ne, me]] += coef * minus * (a.cos() + ap.cos());
                if m < n_max {
                    let mg = basis.index(m + 1, Qubit::Ground);
                    out[[ne, mg]] -= coef * half_i * minus * a.sin();
                }
                if n < n_max {
                    let ng = basis.index(n + 1, Qubit::Ground);
                    out[[ng, me]] += coef * half_i * plus * a.sin();
                }
                if n < n_max && m < n_max {
                    let ng = basis.index(n + 1, Qubit::Ground);
                    let mg = basis.index(m + 1, Qubit::Ground);
                    out[[ng, mg]] += coef * minus * (a.cos() - ap.cos());
                }
            }
        }
    }

    // |g⟩ start: the same printed structure with e ↔ g and the doublet
    // {|n,g⟩, |n−1,e⟩}, whose splitting is sqrt(δ² + g² n).
    let wg = init.ground_weight();
    if wg > 0.0 {
        let nu: Vec<f64> = (0..=n_max)
            .map(|n| params.delta.hypot(params.g * (n as f64).sqrt()))
            .collect();
        for n in 0..=n_max {
            for m in 0..=n_max {
                let diff = n as f64 - m as f64;
                let coef = b[n] * b[m].conj() * (wg * global * (-gamma * t * diff * diff).exp());
                let a = (nu[n] - nu[m]) * t;
                let ap = (nu[n] + nu[m]) * t;
                let ng = basis.index(n, Qubit::Ground);
                let mg = basis.index(m, Qubit::Ground);
                out[[ng, mg]] += coef * minus * (a.cos() + ap.cos());
                if m > 0 {
                    let me = basis.index(m - 1, Qubit::Excited);
                    out[[ng, me]] -= coef * half_i * minus * a.sin();
                }
                if n > 0 {
                    let ne = basis.index(n - 1, Qubit::Excited);
                    out[[ne, mg]] += coef * half_i * plus * a.sin();
                }
                if n > 0 && m > 0 {
                    let ne = basis.index(n - 1, Qubit::Excited);
                    let me = basis.index(m - 1, Qubit::Excited);
                    out[[ne, me]] += coef * minus * (a.cos() - ap.cos());
                }
            }
        }
    }
    rho
}

/// Joint density matrix at scaled time `t` (= λt).
///
/// For θ > 0 the |e⟩- and |g⟩-start solutions are mixed with weights
/// cos²θ and sin²θ.
pub fn joint_state(
    params: &ReducedParams,
    trunc: &FockTruncation,
    init: &InitialState,
    t: f64,
    opts: ClosedFormOptions,
) -> Result<ClosedFormState> {
    if init.n_max() != trunc.n_max {
        return Err(Error::DimensionMismatch {
            expected: 2 * (trunc.n_max + 1),
            found: 2 * (init.n_max() + 1),
        });
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "time must be non-negative, got {t}"
        )));
    }
    params.validate()?;
    let basis = Basis::new(trunc.n_max);
    let mut rho = match opts.mode {
        ClosedFormMode::Corrected => corrected(params, init, basis, t),
        ClosedFormMode::AsPrinted => as_printed(params, init, basis, t, opts.printed_phase),
    };
    let raw_trace = rho.trace();
    let mut normalized = false;
    if opts.normalize && (raw_trace - 1.0).norm() > NORMALIZE_THRESHOLD && raw_trace.re > 0.0 {
        rho.scale(1.0 / raw_trace.re);
        normalized = true;
    }
    Ok(ClosedFormState {
        rho,
        raw_trace,
        normalized,
    })
}

/// Atomic inversion W(t) = P_e − P_g of the reduced qubit state.
pub fn inversion_series(
    params: &ReducedParams,
    trunc: &FockTruncation,
    init: &InitialState,
    times: &[f64],
    opts: ClosedFormOptions,
) -> Result<Vec<(f64, f64)>> {
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("times must be ascending".into()));
    }
    times
        .iter()
        .map(|&t| {
            let state = joint_state(params, trunc, init, t, opts)?;
            let qubit = crate::metrics::partial_trace_field(&state.rho)?;
            Ok((t, crate::metrics::atomic_inversion(&qubit)))
        })
        .collect()
}
