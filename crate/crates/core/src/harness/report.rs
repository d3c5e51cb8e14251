//! The persisted utility report and its renderings: JSON for machines, a
//! flat CSV of per-replicate values, and markdown tables for people.
//!
//! The JSON file is the source of truth. Reading it back recomputes every
//! aggregate from the stored per-replicate values and refuses a file where
//! the two disagree, so renderings can never drift from the evidence.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::budget::LedgerEntry;
use crate::error::{Error, Result};
use crate::harness::bundles::atomic_write;
use crate::harness::config::RunConfig;
use crate::metrics::{MetricCategory, MetricResult};
use crate::stats::mean;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AbsentMetric {
    pub name: String,
    pub category: MetricCategory,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BundleResult {
    pub algorithm: String,
    pub epsilon: f64,
    pub delta: f64,
    pub metrics: Vec<MetricResult>,
    pub absent: Vec<AbsentMetric>,
    pub ledger: Vec<LedgerEntry>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UtilityReport {
    pub config_hash: String,
    pub seed: u64,
    pub started_unix: u64,
    pub finished_unix: u64,
    /// Complexity parameter shared by every CART propensity fit in the run.
    pub cart_cp: Option<f64>,
    /// Bootstrap null pMSE for that CART, computed once on the original.
    pub cart_null_pmse: Option<f64>,
    /// Variable groups used for synthesis, by column name.
    pub groups: Vec<Vec<String>>,
    pub results: Vec<BundleResult>,
    pub warnings: Vec<String>,
}

pub fn report_json_path(cfg: &RunConfig) -> PathBuf {
    cfg.out_dir.join("report.json")
}

pub fn metrics_csv_path(cfg: &RunConfig) -> PathBuf {
    cfg.out_dir.join("metrics.csv")
}

pub fn report_md_path(cfg: &RunConfig) -> PathBuf {
    cfg.out_dir.join("report.md")
}

pub fn radar_svg_path(cfg: &RunConfig, algorithm: &str) -> PathBuf {
    cfg.out_dir.join(format!("radar_{algorithm}.svg"))
}

impl UtilityReport {
    pub fn write_json(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Config(format!("report serialization failed: {e}")))?;
        atomic_write(path, json.as_bytes())
    }

    /// Loads a stored report and re-derives every aggregate from its
    /// per-replicate values; a mismatch means the file was edited or
    /// corrupted and is not safe to render.
    pub fn read_json(path: &Path) -> Result<UtilityReport> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read report {}: {e}", path.display())))?;
        let report: UtilityReport = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("malformed report {}: {e}", path.display())))?;
        for bundle in &report.results {
            for m in &bundle.metrics {
                if m.per_replicate.is_empty() {
                    return Err(Error::Config(format!(
                        "report metric \"{}\" has no replicate values",
                        m.name
                    )));
                }
                let recomputed = mean(&m.per_replicate);
                let tol = 1e-9 * recomputed.abs().max(1.0);
                if !((m.value - recomputed).abs() <= tol) {
                    return Err(Error::Config(format!(
                        "report metric \"{}\" at epsilon {} stores {} but its replicates average to {}",
                        m.name, bundle.epsilon, m.value, recomputed
                    )));
                }
            }
        }
        Ok(report)
    }

    /// Flat per-replicate table. No timestamps, no aggregates: reruns with
    /// the same seed must produce the identical file.
    pub fn metrics_csv(&self) -> String {
        let mut out = String::from("algorithm,metric,category,epsilon,replicate,value\n");
        for bundle in &self.results {
            for m in &bundle.metrics {
                for (i, v) in m.per_replicate.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        bundle.algorithm,
                        m.name,
                        category_name(m.category),
                        bundle.epsilon,
                        i,
                        v
                    );
                }
            }
        }
        out
    }

    /// Algorithms in first-appearance order.
    pub fn algorithms(&self) -> Vec<String> {
        let mut seen = Vec::new();
        for bundle in &self.results {
            if !seen.contains(&bundle.algorithm) {
                seen.push(bundle.algorithm.clone());
            }
        }
        seen
    }

    pub fn bundles_for(&self, algorithm: &str) -> Vec<&BundleResult> {
        let mut v: Vec<&BundleResult> =
            self.results.iter().filter(|b| b.algorithm == algorithm).collect();
        v.sort_by(|a, b| a.epsilon.total_cmp(&b.epsilon));
        v
    }

    pub fn markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# Utility report\n");
        let _ = writeln!(out, "- config: `{}`", self.config_hash);
        let _ = writeln!(out, "- seed: {}", self.seed);
        if let Some(cp) = self.cart_cp {
            let _ = writeln!(out, "- shared CART cp: {cp}");
        }
        let groups: Vec<String> =
            self.groups.iter().map(|g| format!("{{{}}}", g.join(", "))).collect();
        let _ = writeln!(out, "- variable groups: {}", groups.join(" "));
        for algorithm in self.algorithms() {
            let bundles = self.bundles_for(&algorithm);
            let _ = writeln!(out, "\n## {algorithm}\n");
            let mut header = String::from("| metric | category |");
            let mut rule = String::from("| --- | --- |");
            for b in &bundles {
                let _ = write!(header, " eps={} |", b.epsilon);
                rule.push_str(" ---: |");
            }
            let _ = writeln!(out, "{header}");
            let _ = writeln!(out, "{rule}");
            for (name, category) in metric_rows(&bundles) {
                let _ = write!(out, "| {name} | {} |", category_name(category));
                for b in &bundles {
                    match b.metrics.iter().find(|m| m.name == name) {
                        Some(m) => {
                            let _ = write!(out, " {:.4} |", m.value);
                        }
                        None => {
                            let _ = write!(out, " n/a |");
                        }
                    }
                }
                let _ = writeln!(out);
            }
            let mut gaps = Vec::new();
            for b in &bundles {
                for a in &b.absent {
                    gaps.push(format!("- eps={}: `{}`: {}", b.epsilon, a.name, a.reason));
                }
            }
            if !gaps.is_empty() {
                let _ = writeln!(out, "\nAbsent metrics:\n");
                for g in gaps {
                    let _ = writeln!(out, "{g}");
                }
            }
            let mut warns = Vec::new();
            for b in &bundles {
                for w in &b.warnings {
                    warns.push(format!("- eps={}: {}", b.epsilon, w));
                }
            }
            if !warns.is_empty() {
                let _ = writeln!(out, "\nWarnings:\n");
                for w in warns {
                    let _ = writeln!(out, "{w}");
                }
            }
        }
        if !self.warnings.is_empty() {
            let _ = writeln!(out, "\n## Run warnings\n");
            for w in &self.warnings {
                let _ = writeln!(out, "- {w}");
            }
        }
        out
    }
}

pub fn category_name(c: MetricCategory) -> &'static str {
    match c {
        MetricCategory::Marginal => "marginal",
        MetricCategory::Joint => "joint",
        MetricCategory::Correlation => "correlation",
    }
}

fn category_rank(c: MetricCategory) -> usize {
    match c {
        MetricCategory::Marginal => 0,
        MetricCategory::Joint => 1,
        MetricCategory::Correlation => 2,
    }
}

/// Row order for tables and radar axes: category blocks in fixed order,
/// first-appearance order inside each block, absent-only metrics included.
pub fn metric_rows(bundles: &[&BundleResult]) -> Vec<(String, MetricCategory)> {
    let mut rows: Vec<(String, MetricCategory)> = Vec::new();
    for b in bundles {
        for m in &b.metrics {
            if !rows.iter().any(|(n, _)| *n == m.name) {
                rows.push((m.name.clone(), m.category));
            }
        }
        for a in &b.absent {
            if !rows.iter().any(|(n, _)| *n == a.name) {
                rows.push((a.name.clone(), a.category));
            }
        }
    }
    let mut indexed: Vec<(usize, (String, MetricCategory))> = rows.into_iter().enumerate().collect();
    indexed.sort_by_key(|(i, (_, c))| (category_rank(*c), *i));
    indexed.into_iter().map(|(_, r)| r).collect()
}
