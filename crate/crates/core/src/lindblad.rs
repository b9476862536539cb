//! Reference integrator for the phase-damping master equation
//!
//! ```text
//! dρ/dt = −i[H, ρ] + γ (2 N ρ N − N² ρ − ρ N²),   N = ψ†ψ,
//! ```
//!
//! in the rotating frame at the cavity frequency. N generates that frame, so
//! the dissipator is unchanged by it and only δ and g enter H.

use ndarray::{Array2, Zip};

use crate::density::{Basis, DensityMatrix, Qubit, StateTolerances};
use crate::error::{Error, Result};
use crate::model::{FockTruncation, ReducedParams};
use crate::C64;

/// Joint Hamiltonian in the rotating frame.
#[derive(Debug, Clone)]
pub struct JointHamiltonian {
    matrix: Array2<C64>,
    params: ReducedParams,
    /// Nonzero entries (row, col, value), row-major.
    entries: Vec<(usize, usize, C64)>,
}

impl JointHamiltonian {
    /// Wraps an arbitrary Hermitian matrix over the joint basis.
    pub fn from_matrix(matrix: Array2<C64>, params: ReducedParams) -> Result<Self> {
        let (r, c) = matrix.dim();
        if r != c {
            return Err(Error::DimensionMismatch {
                expected: r,
                found: c,
            });
        }
        Basis::from_dim(r)?;
        let defect = crate::density::hermiticity_defect(&matrix);
        if defect > 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Hamiltonian is not Hermitian (defect {defect:.3e})"
            )));
        }
        let entries = matrix
            .indexed_iter()
            .filter(|(_, v)| **v != C64::new(0.0, 0.0))
            .map(|((i, j), v)| (i, j, *v))
            .collect();
        Ok(Self {
            matrix,
            params,
            entries,
        })
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn params(&self) -> &ReducedParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// The 2×2 block of the doublet {|n,e⟩, |n+1,g⟩}.
    pub fn doublet_block(&self, n: usize) -> Option<[[C64; 2]; 2]> {
        let basis = Basis::new(self.dim() / 2 - 1);
        if n >= basis.n_max {
            return None;
        }
        let a = basis.index(n, Qubit::Excited);
        let b = basis.index(n + 1, Qubit::Ground);
        let h = &self.matrix;
        Some([[h[[a, a]], h[[a, b]]], [h[[b, a]], h[[b, b]]]])
    }

    /// H·ρ using the stored nonzero pattern.
    fn apply_left(&self, rho: &Array2<C64>, out: &mut Array2<C64>) {
        out.fill(C64::new(0.0, 0.0));
        for &(i, k, h) in &self.entries {
            let src = rho.row(k);
            let mut dst = out.row_mut(i);
            Zip::from(&mut dst).and(&src).for_each(|d, &s| *d += h * s);
        }
    }
}

/// H with diagonal +δ on |n,e⟩, −δ on |n,g⟩ and
/// ⟨n,e|H|n+1,g⟩ = −i g √(n+1) (Hermitian conjugate below the diagonal).
pub fn build_hamiltonian(params: &ReducedParams, trunc: &FockTruncation) -> JointHamiltonian {
    let basis = Basis::new(trunc.n_max);
    let d = basis.dim();
    let mut h = Array2::<C64>::zeros((d, d));
    for n in 0..=basis.n_max {
        h[[basis.index(n, Qubit::Excited), basis.index(n, Qubit::Excited)]] =
            C64::new(params.delta, 0.0);
        h[[basis.index(n, Qubit::Ground), basis.index(n, Qubit::Ground)]] =
            C64::new(-params.delta, 0.0);
        if n < basis.n_max {
            let c = C64::new(0.0, -params.g * ((n + 1) as f64).sqrt());
            let e = basis.index(n, Qubit::Excited);
            let g = basis.index(n + 1, Qubit::Ground);
            h[[e, g]] = c;
            h[[g, e]] = c.conj();
        }
    }
    JointHamiltonian::from_matrix(h, *params).expect("Hamiltonian is Hermitian by construction")
}

/// Workspace for repeated right-hand-side evaluations.
struct Liouvillian<'a> {
    h: &'a JointHamiltonian,
    /// −γ (n_j − n_k)².
    decay: Array2<f64>,
    scratch: Array2<C64>,
}

impl<'a> Liouvillian<'a> {
    fn new(h: &'a JointHamiltonian, gamma: f64) -> Self {
        let d = h.dim();
        let decay = Array2::from_shape_fn((d, d), |(j, k)| {
            let diff = Basis::photons(j) as f64 - Basis::photons(k) as f64;
            -gamma * diff * diff
        });
        Self {
            h,
            decay,
            scratch: Array2::zeros((d, d)),
        }
    }

    /// out = −i(Hρ − ρH) − γ(n_j − n_k)² ρ_jk. For Hermitian ρ, ρH = (Hρ)†,
    /// which keeps the output exactly Hermitian.
    fn apply(&mut self, rho: &Array2<C64>, out: &mut Array2<C64>) {
        self.h.apply_left(rho, &mut self.scratch);
        let hr = &self.scratch;
        let d = rho.nrows();
        for j in 0..d {
            for k in j..d {
                let comm = hr[[j, k]] - hr[[k, j]].conj();
                let v = C64::new(comm.im, -comm.re) + rho[[j, k]] * self.decay[[j, k]];
                out[[j, k]] = v;
                out[[k, j]] = v.conj();
            }
        }
    }
}

/// dρ/dt for a Hermitian ρ.
pub fn liouvillian_apply(h: &JointHamiltonian, gamma: f64, rho: &DensityMatrix) -> Result<Array2<C64>> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: rho.dim(),
        });
    }
    let mut l = Liouvillian::new(h, gamma);
    let mut out = Array2::zeros((h.dim(), h.dim()));
    l.apply(rho.matrix(), &mut out);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Classical fourth-order Runge–Kutta with fixed step.
    Rk4Fixed { dt: f64 },
    /// Dormand–Prince 5(4) with local error control
    /// |err| ≤ atol + rtol·|y| elementwise.
    Rk45Adaptive { rtol: f64, atol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Steps between trace renormalizations; 0 disables renormalization.
    pub renorm_interval: usize,
    /// Eigenvalue check on every sampled state.
    pub check_positivity: bool,
}

/// Positivity failures beyond this are reported as truncation errors.
pub const POSITIVITY_FAILURE: f64 = 1e-6;

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self::adaptive(1e-9)
    }
}

impl IntegratorConfig {
    pub fn adaptive(tol: f64) -> Self {
        Self {
            method: Method::Rk45Adaptive {
                rtol: tol,
                atol: tol,
            },
            renorm_interval: 0,
            check_positivity: true,
        }
    }

    pub fn rk4(dt: f64) -> Self {
        Self {
            method: Method::Rk4Fixed { dt },
            renorm_interval: 0,
            check_positivity: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.method {
            Method::Rk4Fixed { dt } => dt > 0.0 && dt.is_finite(),
            Method::Rk45Adaptive { rtol, atol } => {
                rtol >= 0.0 && atol >= 0.0 && (rtol > 0.0 || atol > 0.0)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "integrator needs a positive step or tolerance: {:?}",
                self.method
            )))
        }
    }
}

// Dormand–Prince 5(4) tableau. The right-hand side is autonomous, so the
// nodes c_i are not needed.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b − b* (fifth minus fourth order weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn slice(a: &Array2<C64>) -> &[C64] {
    a.as_slice().expect("standard layout")
}

/// out = y + h Σ w_i k_i
fn combine(out: &mut Array2<C64>, y: &Array2<C64>, h: f64, terms: &[(f64, &Array2<C64>)]) {
    out.assign(y);
    for &(w, k) in terms {
        if w != 0.0 {
            out.scaled_add(C64::from(h * w), k);
        }
    }
}

struct Stepper<'a> {
    rhs: Liouvillian<'a>,
    k: [Array2<C64>; 7],
    tmp: Array2<C64>,
    fsal_valid: bool,
}

impl<'a> Stepper<'a> {
    fn new(h: &'a JointHamiltonian, gamma: f64) -> Self {
        let d = h.dim();
        let z = || Array2::<C64>::zeros((d, d));
        Self {
            rhs: Liouvillian::new(h, gamma),
            k: [z(), z(), z(), z(), z(), z(), z()],
            tmp: z(),
            fsal_valid: false,
        }
    }

    fn rk4(&mut self, y: &mut Array2<C64>, h: f64) {
        let [k1, k2, k3, k4, ..] = &mut self.k;
        self.rhs.apply(y, k1);
        combine(&mut self.tmp, y, h, &[(0.5, k1)]);
        self.rhs.apply(&self.tmp, k2);
        combine(&mut self.tmp, y, h, &[(0.5, k2)]);
        self.rhs.apply(&self.tmp, k3);
        combine(&mut self.tmp, y, h, &[(1.0, k3)]);
        self.rhs.apply(&self.tmp, k4);
        let (w1, w2) = (1.0 / 6.0, 1.0 / 3.0);
        y.scaled_add(C64::from(h * w1), k1);
        y.scaled_add(C64::from(h * w2), k2);
        y.scaled_add(C64::from(h * w2), k3);
        y.scaled_add(C64::from(h * w1), k4);
    }

    /// Attempts one Dormand–Prince step from y into `y_new`; returns the
    /// scaled error norm (accept when ≤ 1).
    fn dopri(&mut self, y: &Array2<C64>, y_new: &mut Array2<C64>, h: f64, rtol: f64, atol: f64) -> f64 {
        let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
        if !self.fsal_valid {
            self.rhs.apply(y, k1);
            self.fsal_valid = true;
        }
        combine(&mut self.tmp, y, h, &[(A21, k1)]);
        self.rhs.apply(&self.tmp, k2);
        combine(&mut self.tmp, y, h, &[(A31, k1), (A32, k2)]);
        self.rhs.apply(&self.tmp, k3);
        combine(&mut self.tmp, y, h, &[(A41, k1), (A42, k2), (A43, k3)]);
        self.rhs.apply(&self.tmp, k4);
        combine(&mut self.tmp, y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]);
        self.rhs.apply(&self.tmp, k5);
        combine(
            &mut self.tmp,
            y,
            h,
            &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)],
        );
        self.rhs.apply(&self.tmp, k6);
        combine(y_new, y, h, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)]);
        self.rhs.apply(y_new, k7);

        let (k1, k3, k4, k5, k6, k7) = (slice(k1), slice(k3), slice(k4), slice(k5), slice(k6), slice(k7));
        let (y, y_new) = (slice(y), slice(y_new));
        let mut err: f64 = 0.0;
        for i in 0..y.len() {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            let size = y[i].norm_sqr().max(y_new[i].norm_sqr()).sqrt();
            err = err.max(e.norm_sqr().sqrt() / (atol + rtol * size));
        }
        err
    }

    fn accept(&mut self) {
        // FSAL: k7 of the accepted step is k1 of the next.
        self.k.swap(0, 6);
    }
}

fn renormalize(y: &mut Array2<C64>) {
    let tr: f64 = y.diag().iter().map(|z| z.re).sum();
    if tr > 0.0 {
        y.mapv_inplace(|z| z / tr);
    }
}

fn check_sample(rho: &DensityMatrix, t: f64, cfg: &IntegratorConfig) -> Result<()> {
    if cfg.check_positivity {
        let min = rho.min_eigenvalue();
        if min < -POSITIVITY_FAILURE {
            return Err(Error::PositivityViolation {
                t,
                min_eigenvalue: min,
            });
        }
    }
    Ok(())
}

/// Integrates from ρ(0) = `rho0` to `t_end`, returning ρ at each of the
/// ascending `sample_times` (all within [0, t_end]).
pub fn evolve(
    h: &JointHamiltonian,
    gamma: f64,
    rho0: &DensityMatrix,
    t_end: f64,
    cfg: &IntegratorConfig,
    sample_times: &[f64],
) -> Result<Vec<DensityMatrix>> {
    cfg.validate()?;
    if rho0.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: rho0.dim(),
        });
    }
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma must be non-negative, got {gamma}")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_end must be non-negative, got {t_end}")));
    }
    if sample_times.windows(2).any(|w| w[1] < w[0])
        || sample_times.iter().any(|&t| !(0.0..=t_end).contains(&t))
    {
        return Err(Error::InvalidParameter(
            "sample times must be ascending and within [0, t_end]".into(),
        ));
    }
    let tolerances = StateTolerances::default();
    if rho0.hermiticity_defect() > tolerances.hermiticity {
        return Err(Error::InvalidState("initial state is not Hermitian".into()));
    }

    let mut stepper = Stepper::new(h, gamma);
    let mut y = rho0.matrix().as_standard_layout().into_owned();
    let mut y_new = y.clone();
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut out = Vec::with_capacity(sample_times.len());

    let mut h_try = match cfg.method {
        Method::Rk4Fixed { dt } => dt,
        Method::Rk45Adaptive { .. } => initial_step(h, gamma, t_end),
    };

    for &ts in sample_times {
        while t < ts {
            let remaining = ts - t;
            match cfg.method {
                Method::Rk4Fixed { dt } => {
                    // land exactly on the sample time with a shortened last step
                    let step = if remaining < dt * (1.0 + 1e-12) { remaining } else { dt };
                    stepper.rk4(&mut y, step);
                    t = if step == remaining { ts } else { t + step };
                }
                Method::Rk45Adaptive { rtol, atol } => {
                    let step = h_try.min(remaining);
                    let err = stepper.dopri(&y, &mut y_new, step, rtol, atol);
                    let factor = if err == 0.0 {
                        5.0
                    } else {
                        (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                    };
                    if err <= 1.0 {
                        std::mem::swap(&mut y, &mut y_new);
                        stepper.accept();
                        t = if step == remaining { ts } else { t + step };
                        if step == h_try || factor < 1.0 {
                            h_try = step * factor;
                        }
                    } else {
                        h_try = step * factor.min(1.0);
                        if h_try < 1e-13 * t.abs().max(1.0) {
                            return Err(Error::StepUnderflow { t, step: h_try });
                        }
                    }
                }
            }
            steps += 1;
            if cfg.renorm_interval > 0 && steps.is_multiple_of(cfg.renorm_interval) {
                renormalize(&mut y);
                stepper.fsal_valid = false;
            }
        }
        let rho = DensityMatrix::from_matrix(y.clone())?;
        check_sample(&rho, ts, cfg)?;
        out.push(rho);
    }
    Ok(out)
}

/// Conservative first step: a small fraction of the fastest rate in the
/// problem.
fn initial_step(h: &JointHamiltonian, gamma: f64, t_end: f64) -> f64 {
    let n_max = h.dim() / 2 - 1;
    let h_norm = h
        .matrix()
        .rows()
        .into_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let rate = 2.0 * h_norm + gamma * (n_max * n_max) as f64;
    let step = if rate > 0.0 { 0.01 / rate } else { 0.01 };
    if t_end > 0.0 {
        step.min(t_end)
    } else {
        step
    }
}

/// Tr[ρ (N + |e⟩⟨e|)], the excitation number conserved at γ = 0.
pub fn excitation_number(rho: &DensityMatrix) -> f64 {
    (0..rho.dim())
        .map(|i| {
            let n = Basis::photons(i) as f64;
            let excited = if i % 2 == 0 { 1.0 } else { 0.0 };
            rho.matrix()[[i, i]].re * (n + excited)
        })
        .sum()
}
