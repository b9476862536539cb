//! Sweep configuration: a flat `key = value` text format whose keys double
//! as command-line flag names.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::closed_form::PrintedPhase;
use crate::error::{Error, Result};
use crate::lindblad::{IntegratorConfig, Method};

/// A scalar or an inclusive linear range `min:max:points`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axis {
    Fixed(f64),
    Range { min: f64, max: f64, points: usize },
}

impl Axis {
    pub fn is_range(&self) -> bool {
        matches!(self, Axis::Range { .. })
    }

    pub fn values(&self) -> Vec<f64> {
        match *self {
            Axis::Fixed(v) => vec![v],
            Axis::Range { min, points: 1, .. } => vec![min],
            Axis::Range { min, max, points } => (0..points)
                .map(|k| min + (max - min) * k as f64 / (points - 1) as f64)
                .collect(),
        }
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let num = |p: &str| {
            p.parse::<f64>()
                .map_err(|_| Error::InvalidConfig(format!("not a number: {p:?}")))
        };
        match parts.as_slice() {
            [v] => Ok(Axis::Fixed(num(v)?)),
            [min, max, points] => Ok(Axis::Range {
                min: num(min)?,
                max: num(max)?,
                points: points
                    .parse()
                    .map_err(|_| Error::InvalidConfig(format!("bad point count: {points:?}")))?,
            }),
            _ => Err(Error::InvalidConfig(format!(
                "axis must be a number or min:max:points, got {s:?}"
            ))),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::Fixed(v) => write!(f, "{v}"),
            Axis::Range { min, max, points } => write!(f, "{min}:{max}:{points}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RunMode {
    ClosedPrinted,
    ClosedCorrected,
    Lindblad,
    /// Corrected closed form and the Lindblad reference side by side.
    Both,
}

impl RunMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunMode::ClosedPrinted => "closed_printed",
            RunMode::ClosedCorrected => "closed_corrected",
            RunMode::Lindblad => "lindblad",
            RunMode::Both => "both",
        }
    }
}

impl FromStr for RunMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed_printed" => Ok(RunMode::ClosedPrinted),
            "closed_corrected" => Ok(RunMode::ClosedCorrected),
            "lindblad" => Ok(RunMode::Lindblad),
            "both" => Ok(RunMode::Both),
            _ => Err(Error::InvalidConfig(format!(
                "mode must be closed_printed, closed_corrected, lindblad or both, got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegratorKind {
    Rk45,
    Rk4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub nbar: f64,
    pub theta: f64,
    pub beta_phase: f64,
    pub g_over_lambda: f64,
    pub delta_over_lambda: Axis,
    pub gamma_over_lambda: Axis,
    pub t_max: f64,
    pub t_points: usize,
    pub mode: RunMode,
    pub n_max: Option<usize>,
    pub tail_tolerance: f64,
    pub integrator: IntegratorKind,
    pub tol: f64,
    pub dt: f64,
    pub renorm_interval: usize,
    pub check_positivity: bool,
    /// Normalize closed-form states whose trace deviates from 1.
    pub normalize: bool,
    pub printed_phase: PrintedPhase,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    /// Reserved; the dynamics are deterministic.
    pub seed: Option<u64>,
}

/// Coupling in the C_g ≪ C_J limit of the capacitive reduction, g = λ/(2√2).
pub const DEFAULT_G_OVER_LAMBDA: f64 = 0.353_553_390_593_273_8;

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            nbar: 10.0,
            theta: 0.0,
            beta_phase: 0.0,
            g_over_lambda: DEFAULT_G_OVER_LAMBDA,
            delta_over_lambda: Axis::Fixed(0.0),
            gamma_over_lambda: Axis::Fixed(0.0),
            t_max: 25.0,
            t_points: 500,
            mode: RunMode::ClosedCorrected,
            n_max: None,
            tail_tolerance: 1e-10,
            integrator: IntegratorKind::Rk45,
            tol: 1e-9,
            dt: 1e-3,
            renorm_interval: 0,
            check_positivity: true,
            normalize: true,
            printed_phase: PrintedPhase::RealPhase,
            out: None,
            workers: None,
            seed: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("{key}: cannot parse {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::InvalidConfig(format!("{key}: expected a boolean, got {value:?}"))),
    }
}

fn parse_optional<T: FromStr>(key: &str, value: &str) -> Result<Option<T>> {
    if value.is_empty() || value == "auto" || value == "none" {
        Ok(None)
    } else {
        parse(key, value).map(Some)
    }
}

impl SweepConfig {
    /// Canonical key names, in manifest order.
    pub const KEYS: &'static [&'static str] = &[
        "nbar",
        "theta",
        "beta_phase",
        "g_over_lambda",
        "delta_over_lambda",
        "gamma_over_lambda",
        "t_max",
        "t_points",
        "mode",
        "n_max",
        "tail_tolerance",
        "integrator",
        "tol",
        "dt",
        "renorm_interval",
        "check_positivity",
        "normalize",
        "printed_phase",
        "out",
        "workers",
        "seed",
    ];

    /// Sets one key. Dashes in the key are treated as underscores.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        match key.as_str() {
            "nbar" => self.nbar = parse(&key, value)?,
            "theta" => self.theta = parse(&key, value)?,
            "beta_phase" => self.beta_phase = parse(&key, value)?,
            "g_over_lambda" => self.g_over_lambda = parse(&key, value)?,
            "delta_over_lambda" => self.delta_over_lambda = value.parse()?,
            "gamma_over_lambda" => self.gamma_over_lambda = value.parse()?,
            "t_max" => self.t_max = parse(&key, value)?,
            "t_points" => self.t_points = parse(&key, value)?,
            "mode" => self.mode = value.parse()?,
            "n_max" => self.n_max = parse_optional(&key, value)?,
            "tail_tolerance" => self.tail_tolerance = parse(&key, value)?,
            "integrator" => {
                self.integrator = match value {
                    "rk45" => IntegratorKind::Rk45,
                    "rk4" => IntegratorKind::Rk4,
                    _ => {
                        return Err(Error::InvalidConfig(format!(
                            "integrator must be rk45 or rk4, got {value:?}"
                        )))
                    }
                }
            }
            "tol" => self.tol = parse(&key, value)?,
            "dt" => self.dt = parse(&key, value)?,
            "renorm_interval" => self.renorm_interval = parse(&key, value)?,
            "check_positivity" => self.check_positivity = parse_bool(&key, value)?,
            "normalize" => self.normalize = parse_bool(&key, value)?,
            "printed_phase" => {
                self.printed_phase = match value {
                    "real" => PrintedPhase::RealPhase,
                    "conjugate_difference" => PrintedPhase::ConjugateDifference,
                    _ => {
                        return Err(Error::InvalidConfig(format!(
                            "printed_phase must be real or conjugate_difference, got {value:?}"
                        )))
                    }
                }
            }
            "out" => {
                self.out = if value.is_empty() || value == "-" {
                    None
                } else {
                    Some(PathBuf::from(value))
                }
            }
            "workers" => self.workers = parse_optional(&key, value)?,
            "seed" => self.seed = parse_optional(&key, value)?,
            _ => return Err(Error::InvalidConfig(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`. `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected key = value", lineno + 1))
            })?;
            self.set(key, value)
                .map_err(|e| Error::InvalidConfig(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "auto".into());
        Some(match key {
            "nbar" => self.nbar.to_string(),
            "theta" => self.theta.to_string(),
            "beta_phase" => self.beta_phase.to_string(),
            "g_over_lambda" => self.g_over_lambda.to_string(),
            "delta_over_lambda" => self.delta_over_lambda.to_string(),
            "gamma_over_lambda" => self.gamma_over_lambda.to_string(),
            "t_max" => self.t_max.to_string(),
            "t_points" => self.t_points.to_string(),
            "mode" => self.mode.as_str().into(),
            "n_max" => opt(self.n_max.map(|n| n.to_string())),
            "tail_tolerance" => self.tail_tolerance.to_string(),
            "integrator" => match self.integrator {
                IntegratorKind::Rk45 => "rk45".into(),
                IntegratorKind::Rk4 => "rk4".into(),
            },
            "tol" => self.tol.to_string(),
            "dt" => self.dt.to_string(),
            "renorm_interval" => self.renorm_interval.to_string(),
            "check_positivity" => self.check_positivity.to_string(),
            "normalize" => self.normalize.to_string(),
            "printed_phase" => match self.printed_phase {
                PrintedPhase::RealPhase => "real".into(),
                PrintedPhase::ConjugateDifference => "conjugate_difference".into(),
            },
            "out" => self
                .out
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| "-".into()),
            "workers" => opt(self.workers.map(|n| n.to_string())),
            "seed" => opt(self.seed.map(|n| n.to_string())),
            _ => return None,
        })
    }

    /// The configuration as `key = value` lines, re-readable by
    /// [`SweepConfig::from_text`]. Worker count and output path are left out
    /// because they do not affect results.
    pub fn to_text(&self) -> String {
        Self::KEYS
            .iter()
            .filter(|k| !matches!(**k, "workers" | "out"))
            .map(|k| format!("{k} = {}\n", self.get(k).unwrap_or_default()))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.nbar >= 0.0 && self.nbar.is_finite()) {
            return bad(format!("nbar must be non-negative, got {}", self.nbar));
        }
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&self.theta) {
            return bad(format!("theta must lie in [0, pi/2], got {}", self.theta));
        }
        if !(self.g_over_lambda > 0.0 && self.g_over_lambda.is_finite()) {
            return bad(format!("g_over_lambda must be positive, got {}", self.g_over_lambda));
        }
        if self.delta_over_lambda.is_range() && self.gamma_over_lambda.is_range() {
            return bad("at most one of delta_over_lambda and gamma_over_lambda may be a range".into());
        }
        if self.gamma_over_lambda.values().iter().any(|g| !(*g >= 0.0 && g.is_finite())) {
            return bad("gamma_over_lambda must be non-negative".into());
        }
        if self.delta_over_lambda.values().iter().any(|d| !d.is_finite()) {
            return bad("delta_over_lambda must be finite".into());
        }
        if !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            return bad(format!("t_max must be non-negative, got {}", self.t_max));
        }
        if self.t_points < 2 {
            return bad(format!("t_points must be at least 2, got {}", self.t_points));
        }
        if !(self.tail_tolerance > 0.0 && self.tail_tolerance < 1.0) {
            return bad(format!("tail_tolerance must lie in (0, 1), got {}", self.tail_tolerance));
        }
        if self.n_max == Some(0) {
            return bad("n_max must be at least 1".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        self.integrator_config().validate().map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn integrator_config(&self) -> IntegratorConfig {
        let method = match self.integrator {
            IntegratorKind::Rk45 => Method::Rk45Adaptive {
                rtol: self.tol,
                atol: self.tol,
            },
            IntegratorKind::Rk4 => Method::Rk4Fixed { dt: self.dt },
        };
        IntegratorConfig {
            method,
            renorm_interval: self.renorm_interval,
            check_positivity: self.check_positivity,
        }
    }

    /// Sample times t_k = t_max · k / (t_points − 1).
    pub fn times(&self) -> Vec<f64> {
        let last = (self.t_points - 1) as f64;
        (0..self.t_points)
            .map(|k| self.t_max * k as f64 / last)
            .collect()
    }

    /// (δ/λ, γ/λ) grid points, axis-major.
    pub fn grid(&self) -> Vec<(f64, f64)> {
        let deltas = self.delta_over_lambda.values();
        let gammas = self.gamma_over_lambda.values();
        deltas
            .iter()
            .flat_map(|&d| gammas.iter().map(move |&g| (d, g)))
            .collect()
    }
}
