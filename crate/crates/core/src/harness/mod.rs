//! Command layer: synthesis bundles, metric evaluation, report rendering,
//! and the pipeline that chains them, all driven by one TOML config.

pub mod bundles;
pub mod config;
pub mod evaluate;
pub mod radar;
pub mod report;
pub mod scan;

use crate::error::{Error, Result};

pub use bundles::{cmd_synth, load_context, RunContext};
pub use config::RunConfig;
pub use evaluate::{cmd_evaluate, EvalOutput};
pub use report::UtilityReport;

/// How a completed run ended; hard failures stay in `Err`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    Clean,
    /// Finished, but some metric value is missing from the report.
    Degraded,
}

/// Persists an evaluation: report.json is the source of truth, metrics.csv
/// its flat per-replicate view.
pub fn write_evaluation(cfg: &RunConfig, out: &EvalOutput) -> Result<()> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    out.report.write_json(&report::report_json_path(cfg))?;
    bundles::atomic_write(
        &report::metrics_csv_path(cfg),
        out.report.metrics_csv().as_bytes(),
    )?;
    Ok(())
}

/// Renders markdown tables, the flat CSV and one radar per algorithm from
/// the stored report. A radar with too few complete axes is skipped with a
/// warning; the tables still carry everything.
pub fn cmd_report(cfg: &RunConfig) -> Result<()> {
    let report = UtilityReport::read_json(&report::report_json_path(cfg))?;
    bundles::atomic_write(&report::metrics_csv_path(cfg), report.metrics_csv().as_bytes())?;
    bundles::atomic_write(&report::report_md_path(cfg), report.markdown().as_bytes())?;
    for algorithm in report.algorithms() {
        match radar::build_radar(&report, &algorithm) {
            Ok(chart) => {
                for name in &chart.dropped {
                    log::warn!("radar for {algorithm}: axis {name} omitted (missing for some epsilon)");
                }
                bundles::atomic_write(
                    &report::radar_svg_path(cfg, &algorithm),
                    chart.svg.as_bytes(),
                )?;
            }
            Err(Error::Degenerate(msg)) => {
                log::warn!("no radar chart for {algorithm}: {msg}");
            }
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

/// synth, evaluate, report, then the leak scan. Reuses bundles already on
/// disk when the output directory's manifest matches this config.
pub fn cmd_pipeline(cfg: &RunConfig, unsafe_public_fallback: bool) -> Result<RunOutcome> {
    let ctx = load_context(cfg, unsafe_public_fallback)?;
    cmd_synth(cfg, &ctx)?;
    let out = cmd_evaluate(cfg, &ctx)?;
    write_evaluation(cfg, &out)?;
    cmd_report(cfg)?;
    let artifacts = scan::report_artifacts(&cfg.out_dir, &out.report.algorithms());
    let leaks = scan::scan_for_leaks(&ctx.original, &artifacts)?;
    if !leaks.is_empty() {
        return Err(Error::Config(format!(
            "aborting: report artifacts quote original records ({})",
            leaks.join("; ")
        )));
    }
    Ok(if out.degraded { RunOutcome::Degraded } else { RunOutcome::Clean })
}
