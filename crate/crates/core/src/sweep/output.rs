use std::io::Write;

use super::config::SweepConfig;
use super::run::SweepRecord;
use crate::error::Result;

pub const CSV_HEADER: &str = "t_scaled,delta_over_lambda,gamma_over_lambda,theta,nbar,mode,\
inversion,linear_entropy_raw,idempotency_defect,concurrence_2q,negativity,purity,\
mean_photons,trace_error,residual";

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn format_row(r: &SweepRecord) -> String {
    let m = &r.metrics;
    [
        num(m.t),
        num(r.delta_over_lambda),
        num(r.gamma_over_lambda),
        num(r.theta),
        num(r.nbar),
        r.source.as_str().to_string(),
        num(m.inversion),
        num(m.linear_entropy_raw),
        num(m.idempotency_defect),
        opt(m.concurrence_2q),
        num(m.negativity),
        num(m.purity),
        num(m.mean_photons),
        num(m.trace_error),
        opt(r.residual),
    ]
    .join(",")
}

/// `#`-prefixed configuration echo placed ahead of the CSV header.
pub fn manifest_header(cfg: &SweepConfig) -> String {
    let mut s = format!("# cpbox {CODE_VERSION}\n");
    for line in cfg.to_text().lines() {
        s.push_str("# ");
        s.push_str(line);
        s.push('\n');
    }
    s
}

/// Writes the manifest, the header and one line per record. The output
/// depends only on the configuration, so reruns are byte-identical.
pub fn write_csv<W: Write>(w: &mut W, cfg: &SweepConfig, records: &[SweepRecord]) -> Result<()> {
    w.write_all(manifest_header(cfg).as_bytes())?;
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(w, "{}", format_row(r))?;
    }
    Ok(())
}

/// Run facts that vary between reruns, kept out of the CSV itself.
pub fn run_manifest(cfg: &SweepConfig, rows: usize, wall_seconds: f64) -> String {
    format!(
        "{}# rows = {rows}\n# workers = {}\n# wall_time_s = {wall_seconds:.3}\n",
        manifest_header(cfg),
        cfg.get("workers").unwrap_or_default(),
    )
}
