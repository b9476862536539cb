use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use cpbox_core::sweep::{
    compare_report, run_manifest, run_sweep, validate, write_csv, RunMode, SweepConfig,
};
use cpbox_core::Error;

const EXIT_INVALID_CONFIG: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_GATE: u8 = 3;

#[derive(Parser)]
#[command(name = "cpbox", version, about = "Cooper-pair box in a phase-damped cavity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full trajectory at a single (delta, gamma) point.
    Simulate(Options),
    /// Trajectories over a delta_over_lambda range.
    SweepDetuning(Options),
    /// Trajectories over a gamma_over_lambda range.
    SweepDamping(Options),
    /// Closed form vs master-equation reference; exit 3 if the gamma = 0 gate fails.
    Compare(Options),
    /// Invariant checks at the configured point; exit 3 if any fails.
    Validate(Options),
}

/// Every flag mirrors a config-file key of the same name; flags win.
#[derive(Args, Debug, Default)]
struct Options {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    nbar: Option<String>,
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    beta_phase: Option<String>,
    #[arg(long)]
    g_over_lambda: Option<String>,
    /// Scalar or min:max:points.
    #[arg(long, allow_hyphen_values = true)]
    delta_over_lambda: Option<String>,
    /// Scalar or min:max:points.
    #[arg(long)]
    gamma_over_lambda: Option<String>,
    #[arg(long)]
    t_max: Option<String>,
    #[arg(long)]
    t_points: Option<String>,
    /// closed_printed, closed_corrected, lindblad or both.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    n_max: Option<String>,
    #[arg(long)]
    tail_tolerance: Option<String>,
    /// rk45 or rk4.
    #[arg(long)]
    integrator: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    renorm_interval: Option<String>,
    #[arg(long)]
    check_positivity: Option<String>,
    #[arg(long)]
    normalize: Option<String>,
    /// real or conjugate_difference.
    #[arg(long)]
    printed_phase: Option<String>,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<String>,
    /// Worker threads; defaults to available parallelism.
    #[arg(long)]
    workers: Option<String>,
    /// Reserved.
    #[arg(long)]
    seed: Option<String>,
}

impl Options {
    fn overrides(&self) -> Vec<(&'static str, &String)> {
        [
            ("nbar", &self.nbar),
            ("theta", &self.theta),
            ("beta_phase", &self.beta_phase),
            ("g_over_lambda", &self.g_over_lambda),
            ("delta_over_lambda", &self.delta_over_lambda),
            ("gamma_over_lambda", &self.gamma_over_lambda),
            ("t_max", &self.t_max),
            ("t_points", &self.t_points),
            ("mode", &self.mode),
            ("n_max", &self.n_max),
            ("tail_tolerance", &self.tail_tolerance),
            ("integrator", &self.integrator),
            ("tol", &self.tol),
            ("dt", &self.dt),
            ("renorm_interval", &self.renorm_interval),
            ("check_positivity", &self.check_positivity),
            ("normalize", &self.normalize),
            ("printed_phase", &self.printed_phase),
            ("out", &self.out),
            ("workers", &self.workers),
            ("seed", &self.seed),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| (k, v)))
        .collect()
    }

    fn load(&self) -> Result<SweepConfig, Error> {
        let mut cfg = SweepConfig::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(|e| {
                Error::InvalidConfig(format!("cannot read {}: {e}", path.display()))
            })?;
            cfg.apply_text(&text)?;
        }
        for (key, value) in self.overrides() {
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

enum Outcome {
    Ok,
    GateFailed,
}

fn sidecar(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest");
    PathBuf::from(name)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn sweep(cfg: &SweepConfig) -> Result<Outcome, Error> {
    let start = Instant::now();
    let records = run_sweep(cfg)?;
    let mut buf = Vec::new();
    write_csv(&mut buf, cfg, &records)?;
    match &cfg.out {
        Some(path) => fs::write(path, &buf)?,
        None => io::stdout().lock().write_all(&buf)?,
    }
    let manifest = run_manifest(cfg, records.len(), start.elapsed().as_secs_f64());
    if let Some(path) = &cfg.out {
        fs::write(sidecar(path), &manifest)?;
    }
    eprint!("{manifest}");
    Ok(Outcome::Ok)
}

fn require_axis(cfg: &SweepConfig, detuning: bool) -> Result<(), Error> {
    let (axis, name) = if detuning {
        (&cfg.delta_over_lambda, "delta_over_lambda")
    } else {
        (&cfg.gamma_over_lambda, "gamma_over_lambda")
    };
    if axis.is_range() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{name} must be a min:max:points range")))
    }
}

fn run(command: Command) -> Result<Outcome, Error> {
    match command {
        Command::Simulate(opts) => {
            let cfg = opts.load()?;
            if cfg.grid().len() != 1 {
                return Err(Error::InvalidConfig(
                    "simulate needs scalar delta_over_lambda and gamma_over_lambda".into(),
                ));
            }
            sweep(&cfg)
        }
        Command::SweepDetuning(opts) => {
            let cfg = opts.load()?;
            require_axis(&cfg, true)?;
            sweep(&cfg)
        }
        Command::SweepDamping(opts) => {
            let cfg = opts.load()?;
            require_axis(&cfg, false)?;
            sweep(&cfg)
        }
        Command::Compare(opts) => {
            let mut cfg = opts.load()?;
            cfg.mode = RunMode::Both;
            let report = compare_report(&cfg)?;
            print!("{}", report.to_text());
            if let Some(path) = &cfg.out {
                fs::write(path, report.to_csv())?;
            }
            Ok(if report.gate_passed() {
                Outcome::Ok
            } else {
                Outcome::GateFailed
            })
        }
        Command::Validate(opts) => {
            let cfg = opts.load()?;
            let report = validate(&cfg)?;
            emit(cfg.out.as_deref(), &report.to_text())?;
            Ok(if report.passed() {
                Outcome::Ok
            } else {
                Outcome::GateFailed
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::GateFailed) => ExitCode::from(EXIT_GATE),
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                ExitCode::from(EXIT_NUMERICAL)
            } else {
                ExitCode::from(EXIT_INVALID_CONFIG)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let dir = std::env::temp_dir().join(format!("cpbox-cli-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.conf");
        fs::write(&path, "nbar = 4\nt-points = 9\n").unwrap();
        let opts = Options {
            config: Some(path),
            nbar: Some("6".into()),
            ..Options::default()
        };
        let cfg = opts.load().unwrap();
        assert_eq!(cfg.nbar, 6.0);
        assert_eq!(cfg.t_points, 9);
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn parses_negative_detuning_range() {
        let cli = Cli::try_parse_from([
            "cpbox",
            "sweep-detuning",
            "--delta-over-lambda",
            "-1:1:5",
        ])
        .unwrap();
        let Command::SweepDetuning(opts) = cli.command else {
            panic!("wrong subcommand")
        };
        assert!(opts.load().unwrap().delta_over_lambda.is_range());
    }

    #[test]
    fn numerical_errors_map_to_exit_two() {
        let e = Error::PositivityViolation {
            t: 1.0,
            min_eigenvalue: -1.0,
        };
        assert!(e.is_numerical());
        assert!(!Error::NoGridPoints.is_numerical());
    }

    #[test]
    fn sidecar_appends_suffix() {
        assert_eq!(sidecar(Path::new("a/b.csv")), PathBuf::from("a/b.csv.manifest"));
    }
}
