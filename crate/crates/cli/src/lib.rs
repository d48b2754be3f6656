//! Configuration, tabulation and experiment pipelines behind the `ptgain`
//! binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod table;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use table::CurveTable;

use std::path::{Path, PathBuf};

use config::ExperimentKind;
use experiments::{run_decay_check, run_fig2, run_fig3, run_spectrum, write_report, Report};
use serde::Serialize;

/// Output directory used when neither `--out` nor `output_dir` is given.
pub const DEFAULT_OUT_DIR: &str = "out";

/// Validates `cfg` for `kind`, runs it and writes the results under `out`
/// (falling back to the configured or default directory). Returns warnings.
pub fn execute(kind: ExperimentKind, cfg: &ExperimentConfig, out: Option<&Path>) -> Result<Vec<String>, CliError> {
    cfg.check_kind(kind)?;
    let dir: PathBuf = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    let svg = cfg.svg.unwrap_or(false);
    let stride = cfg.output_stride.unwrap_or(1);
    fn finish<S: Serialize>(r: Report<S>, dir: &Path, stride: usize, svg: bool) -> Result<Vec<String>, CliError> {
        write_report(&r, dir, stride, svg)?;
        Ok(r.warnings)
    }
    match kind {
        ExperimentKind::Fig2 => finish(run_fig2(&cfg.fig2()?)?, &dir, stride, svg),
        ExperimentKind::Fig3 => finish(run_fig3(&cfg.fig3()?)?, &dir, stride, svg),
        ExperimentKind::Spectrum => finish(run_spectrum(&cfg.spectrum()?)?, &dir, 1, svg),
        ExperimentKind::DecayCheck => finish(run_decay_check(&cfg.decay_check()?)?, &dir, stride, svg),
    }
}
