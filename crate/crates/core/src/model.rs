//! Physical parameters, reduction to natural units, dressed-state
//! frequencies and the truncated coherent field.
//!
//! All dynamics run in units of the reference rate
//! λ = sqrt(e²ω / (ħ C_F)): times are λt and rates are fractions of λ.
//! SI quantities only enter through [`reduce_params`].

use std::fmt;

use crate::error::{Error, Result};
use crate::C64;

/// Elementary charge (C).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Raw device description in SI units. Energies are in joules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceParams {
    /// Junction capacitance C_J (F).
    pub c_j: f64,
    /// Gate capacitance C_g (F).
    pub c_g: f64,
    /// Field capacitance parameter C_F (F).
    pub c_f: f64,
    /// Cavity angular frequency ω (rad/s).
    pub omega: f64,
    /// Josephson energy E_J (J).
    pub e_j: f64,
    /// Thermal energy k_B T (J), if a bath temperature is specified.
    pub temperature: Option<f64>,
}

impl DeviceParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c_j", self.c_j), ("c_g", self.c_g), ("c_f", self.c_f)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "capacitance {name} must be positive, got {v}"
                )));
            }
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "omega must be positive, got {}",
                self.omega
            )));
        }
        if !self.e_j.is_finite() {
            return Err(Error::InvalidParameter("e_j must be finite".into()));
        }
        if let Some(kt) = self.temperature {
            if !(kt >= 0.0 && kt.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "temperature must be non-negative, got {kt}"
                )));
            }
        }
        Ok(())
    }

    /// Charging energy E_c = e² / (2 (C_g + C_J)).
    pub fn charging_energy(&self) -> f64 {
        ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (2.0 * (self.c_g + self.c_j))
    }

    /// Reference rate λ = sqrt(e²ω / (ħ C_F)) in rad/s.
    pub fn lambda_scale(&self) -> f64 {
        (ELEMENTARY_CHARGE * ELEMENTARY_CHARGE * self.omega / (HBAR * self.c_f)).sqrt()
    }
}

/// Dimensionless working set. `g`, `delta` and `gamma` are in units of
/// `lambda_scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedParams {
    pub g: f64,
    /// Half-detuning δ = Δ/2.
    pub delta: f64,
    pub gamma: f64,
    /// λ in rad/s; informational only (NaN when the working set was given
    /// directly in scaled units).
    pub lambda_scale: f64,
}

impl ReducedParams {
    /// Working set given directly in units of λ.
    pub fn scaled(g: f64, delta: f64, gamma: f64) -> Result<Self> {
        let p = Self {
            g,
            delta,
            gamma,
            lambda_scale: f64::NAN,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "coupling g must be positive, got {}",
                self.g
            )));
        }
        if !self.delta.is_finite() {
            return Err(Error::InvalidParameter("delta must be finite".into()));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be non-negative, got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }
}

/// Reduces SI device parameters to the λ-scaled working set (ħ = 1 after
/// this point). `gamma_raw` is the phase-damping rate in s⁻¹.
pub fn reduce_params(device: &DeviceParams, gamma_raw: f64) -> Result<ReducedParams> {
    device.validate()?;
    if !(gamma_raw >= 0.0 && gamma_raw.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "damping rate must be non-negative, got {gamma_raw}"
        )));
    }
    let lambda = device.lambda_scale();
    let ratio = device.c_j / (device.c_j + device.c_g);
    let g = ratio / (2.0 * std::f64::consts::SQRT_2);
    let delta = (device.e_j - HBAR * device.omega) / (2.0 * HBAR) / lambda;
    Ok(ReducedParams {
        g,
        delta,
        gamma: gamma_raw / lambda,
        lambda_scale: lambda,
    })
}

/// Violated energy-scale orderings for the two-level charge regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeWarning {
    /// k_B T is not ≪ E_J.
    ThermalNotSmall { ratio: f64 },
    /// E_J is not within a factor 3 of ħω.
    OffResonance { ratio: f64 },
    /// ħω is not ≪ E_c.
    PhotonNotBelowCharging { ratio: f64 },
    /// E_J is not ≪ E_c.
    JosephsonNotBelowCharging { ratio: f64 },
}

impl fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegimeWarning::ThermalNotSmall { ratio } => {
                write!(f, "k_BT not << E_J (k_BT/E_J = {ratio:.3})")
            }
            RegimeWarning::OffResonance { ratio } => {
                write!(f, "E_J not ~ hbar*omega (E_J/(hbar*omega) = {ratio:.3})")
            }
            RegimeWarning::PhotonNotBelowCharging { ratio } => {
                write!(f, "hbar*omega not << E_c (hbar*omega/E_c = {ratio:.3})")
            }
            RegimeWarning::JosephsonNotBelowCharging { ratio } => {
                write!(f, "E_J not << E_c (E_J/E_c = {ratio:.3})")
            }
        }
    }
}

/// "≪" means a ratio below this.
pub const MUCH_LESS_RATIO: f64 = 0.1;
/// "≈" means within this factor.
pub const APPROX_FACTOR: f64 = 3.0;

/// Checks k_BT ≪ E_J ≈ ħω ≪ E_c and E_J ≪ E_c. Advisory only.
pub fn validate_regime(device: &DeviceParams) -> Vec<RegimeWarning> {
    let e_c = device.charging_energy();
    let photon = HBAR * device.omega;
    let e_j = device.e_j;
    let mut warnings = Vec::new();

    if let Some(kt) = device.temperature {
        let ratio = kt / e_j;
        if ratio.is_nan() || ratio >= MUCH_LESS_RATIO || e_j <= 0.0 {
            warnings.push(RegimeWarning::ThermalNotSmall { ratio });
        }
    }
    let ratio = e_j / photon;
    if !(1.0 / APPROX_FACTOR..=APPROX_FACTOR).contains(&ratio) {
        warnings.push(RegimeWarning::OffResonance { ratio });
    }
    let ratio = photon / e_c;
    if ratio.is_nan() || ratio >= MUCH_LESS_RATIO {
        warnings.push(RegimeWarning::PhotonNotBelowCharging { ratio });
    }
    let ratio = e_j / e_c;
    if ratio.is_nan() || ratio >= MUCH_LESS_RATIO {
        warnings.push(RegimeWarning::JosephsonNotBelowCharging { ratio });
    }
    warnings
}

/// Dressed-state splitting μ_n = sqrt(δ² + g²(n+1)), in units of λ.
pub fn rabi_frequency(params: &ReducedParams, n: usize) -> f64 {
    params.delta.hypot(params.g * ((n + 1) as f64).sqrt())
}

/// μ_n in rad/s evaluated straight from the SI device parameters,
/// μ_n = 1/(2(C_J+C_g)) · sqrt((8δ²C_F(C_J+C_g)² + e²ωC_J²(n+1)/ħ) / (2C_F)),
/// with δ = (E_J − ħω)/(2ħ) in rad/s.
pub fn rabi_frequency_si(device: &DeviceParams, n: usize) -> f64 {
    let c_sum = device.c_j + device.c_g;
    let delta = (device.e_j - HBAR * device.omega) / (2.0 * HBAR);
    let e2 = ELEMENTARY_CHARGE * ELEMENTARY_CHARGE;
    let inner = 8.0 * delta * delta * device.c_f * c_sum * c_sum
        + e2 * device.omega * device.c_j * device.c_j * (n + 1) as f64 / HBAR;
    (inner / (2.0 * device.c_f)).sqrt() / (2.0 * c_sum)
}

/// Photon-number cutoff of the truncated Fock space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockTruncation {
    pub n_max: usize,
    /// Probability mass allowed above `n_max`.
    pub tail_tolerance: f64,
}

impl FockTruncation {
    pub fn new(n_max: usize, tail_tolerance: f64) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidParameter("n_max must be at least 1".into()));
        }
        if !(tail_tolerance > 0.0 && tail_tolerance < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tail tolerance must lie in (0, 1), got {tail_tolerance}"
            )));
        }
        Ok(Self {
            n_max,
            tail_tolerance,
        })
    }
}

fn ln_poisson(nbar: f64, n: usize, ln_factorial: f64) -> f64 {
    if nbar == 0.0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -nbar + n as f64 * nbar.ln() - ln_factorial
}

/// Σ_{n > n_max} e^{−n̄} n̄ⁿ / n!, summed term by term above the cutoff so
/// that tails far below machine epsilon stay accurate.
pub fn poisson_tail(nbar: f64, n_max: usize) -> f64 {
    if nbar == 0.0 {
        return 0.0;
    }
    let mut ln_fact: f64 = (1..=n_max + 1).map(|k| (k as f64).ln()).sum();
    let mut n = n_max + 1;
    let mut sum = 0.0;
    loop {
        let term = ln_poisson(nbar, n, ln_fact).exp();
        sum += term;
        // terms decrease geometrically once n > n̄
        if n as f64 > nbar && term <= sum * 1e-17 {
            break;
        }
        if n > n_max + 100_000 {
            break;
        }
        n += 1;
        ln_fact += (n as f64).ln();
    }
    sum
}

/// Smallest cutoff whose Poisson tail is below `tail_tolerance`, never less
/// than max(4, ⌈n̄ + 6√n̄⌉).
pub fn choose_truncation(alpha_abs: f64, tail_tolerance: f64) -> FockTruncation {
    let nbar = alpha_abs * alpha_abs;
    let floor = ((nbar + 6.0 * nbar.sqrt()).ceil() as usize).max(4);
    let mut n_max = floor;
    while poisson_tail(nbar, n_max) >= tail_tolerance {
        n_max += 1;
    }
    FockTruncation {
        n_max,
        tail_tolerance,
    }
}

/// Truncated coherent-state amplitudes b_n = ⟨n|α⟩, α = |α| e^{iβ}.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentAmplitudes {
    pub alpha_abs: f64,
    pub beta_phase: f64,
    pub amplitudes: Vec<C64>,
}

impl CoherentAmplitudes {
    pub fn n_max(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn mean_photons(&self) -> f64 {
        self.alpha_abs * self.alpha_abs
    }

    /// Σ |b_n|² over the retained levels.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|b| b.norm_sqr()).sum()
    }
}

/// Builds b_0..b_{n_max} through the log-domain recurrence
/// ln|b_{n+1}| = ln|b_n| + ln|α| − ½ ln(n+1).
pub fn coherent_amplitudes(
    alpha_abs: f64,
    beta_phase: f64,
    trunc: &FockTruncation,
) -> Result<CoherentAmplitudes> {
    if !(alpha_abs >= 0.0 && alpha_abs.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "|alpha| must be non-negative, got {alpha_abs}"
        )));
    }
    let nbar = alpha_abs * alpha_abs;
    let tail = poisson_tail(nbar, trunc.n_max);
    if tail > trunc.tail_tolerance {
        return Err(Error::TruncationTooSmall {
            n_max: trunc.n_max,
            tail,
            tolerance: trunc.tail_tolerance,
        });
    }

    let mut amplitudes = Vec::with_capacity(trunc.n_max + 1);
    let ln_alpha = alpha_abs.ln();
    let mut ln_mag = -0.5 * nbar;
    for n in 0..=trunc.n_max {
        if n > 0 {
            ln_mag += ln_alpha - 0.5 * (n as f64).ln();
        }
        let mag = if alpha_abs == 0.0 && n > 0 { 0.0 } else { ln_mag.exp() };
        amplitudes.push(C64::from_polar(mag, n as f64 * beta_phase));
    }
    Ok(CoherentAmplitudes {
        alpha_abs,
        beta_phase,
        amplitudes,
    })
}

/// Factorized initial state (cos²θ |e⟩⟨e| + sin²θ |g⟩⟨g|) ⊗ |α⟩⟨α|.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialState {
    /// Qubit mixing angle, 0 ≤ θ < π/2 (θ = π/2 is admitted as the pure |g⟩ start).
    pub theta: f64,
    pub field: CoherentAmplitudes,
}

impl InitialState {
    pub fn new(theta: f64, field: CoherentAmplitudes) -> Result<Self> {
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
            return Err(Error::InvalidParameter(format!(
                "theta must lie in [0, pi/2], got {theta}"
            )));
        }
        Ok(Self { theta, field })
    }

    /// Weight cos²θ of the |e⟩ start.
    pub fn excited_weight(&self) -> f64 {
        self.theta.cos().powi(2)
    }

    /// Weight sin²θ of the |g⟩ start.
    pub fn ground_weight(&self) -> f64 {
        self.theta.sin().powi(2)
    }

    pub fn n_max(&self) -> usize {
        self.field.n_max()
    }

    /// The joint initial density matrix.
    pub fn density_matrix(&self) -> crate::DensityMatrix {
        let b = &self.field.amplitudes;
        let nf = b.len();
        let field = ndarray::Array2::from_shape_fn((nf, nf), |(n, m)| b[n] * b[m].conj());
        let z = C64::new(0.0, 0.0);
        let qubit = [
            [C64::new(self.excited_weight(), 0.0), z],
            [z, C64::new(self.ground_weight(), 0.0)],
        ];
        crate::DensityMatrix::product(&qubit, &field).expect("square field matrix")
    }
}
