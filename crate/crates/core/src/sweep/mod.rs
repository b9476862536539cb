//! Parameter sweeps over detuning or damping, with CSV output, a
//! closed-form vs reference comparison and an invariant check.

mod compare;
mod config;
mod output;
mod run;
mod validate;

pub use compare::{compare_report, CompareReport, PointComparison, GATE_TOLERANCE};
pub use config::{Axis, IntegratorKind, RunMode, SweepConfig, DEFAULT_G_OVER_LAMBDA};
pub use output::{format_row, manifest_header, run_manifest, write_csv, CODE_VERSION, CSV_HEADER};
pub use run::{run_sweep, setup_point, PointSetup, RowSource, SweepRecord};
pub use validate::{validate, Check, ValidationReport};
