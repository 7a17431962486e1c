//! Configuration, orchestration and report emission for the `qcreg` tool.

// `!(x > 0.0)` style checks are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod emit;
pub mod error;
pub mod report;
pub mod run;

pub use config::{load_config, parse_config, AnalysisConfig, OutputConfig, OutputFormat, Subject};
pub use emit::{emit_as, emit_report, load_report, report_json, write_csv_bundle, write_json};
pub use error::{CliError, EXIT_INVARIANT, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};
pub use report::{EllipticSummary, Provenance, RunReport};
pub use run::run_analysis;

/// Sizes the global worker pool from `QCREG_THREADS`, if set.
pub fn init_threads() -> Result<Option<usize>, CliError> {
    let Ok(raw) = std::env::var("QCREG_THREADS") else {
        return Ok(None);
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("QCREG_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size worker pool: {e}")))?;
    Ok(Some(n))
}
