//! Synthesis side of the harness: turns a [`RunConfig`] into on-disk bundles,
//! one directory per (algorithm, epsilon) with a CSV per replicate and a
//! manifest recording the privacy accounting.
//!
//! Every file lands via write-to-temp-then-rename, and manifests are written
//! after the data they describe, so a crash can leave stray CSVs but never a
//! manifest that overstates what exists.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::assoc::{association_matrix, group_variables, GroupingPlan};
use crate::budget::{split_budget, BudgetAccountant, LedgerEntry, PrivacyParams};
use crate::data::{discretize, Dataset, LoadPolicy};
use crate::error::{Error, Result};
use crate::harness::config::RunConfig;
use crate::rng::{mix, SeededRng};
use crate::schema::Schema;
use crate::synth::{synth_dpsyn, synth_fieldgroups, Algorithm, SynthesisConfig, SyntheticBundle};

pub const RUN_MANIFEST: &str = "manifest.json";
pub const BUNDLE_MANIFEST: &str = "manifest.json";

/// One cell of the (algorithm, epsilon) grid; delta is zero for pure-DP
/// mechanisms and the configured delta otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BundleSpec {
    pub algorithm: Algorithm,
    pub epsilon: f64,
    pub delta: f64,
}

impl BundleSpec {
    pub fn dir_name(&self) -> String {
        format!("{}_eps{}", self.algorithm.name(), self.epsilon)
    }

    pub fn params(&self) -> Result<PrivacyParams> {
        PrivacyParams::new(self.epsilon, self.delta)
    }
}

pub fn bundle_grid(cfg: &RunConfig) -> Vec<BundleSpec> {
    let mut grid = Vec::new();
    for &algorithm in &cfg.algorithms {
        let delta = match algorithm {
            Algorithm::FieldGroups => 0.0,
            Algorithm::DpSyn => cfg.delta,
        };
        for &epsilon in &cfg.epsilons {
            grid.push(BundleSpec { algorithm, epsilon, delta });
        }
    }
    grid
}

pub fn bundles_root(cfg: &RunConfig) -> PathBuf {
    cfg.out_dir.join("bundles")
}

pub fn bundle_dir(cfg: &RunConfig, spec: &BundleSpec) -> PathBuf {
    bundles_root(cfg).join(spec.dir_name())
}

fn replicate_file(i: u32) -> String {
    format!("replicate_{i:02}.csv")
}

/// Inputs shared by every command: schema, the original table, and the
/// grouping plan derived from the public table.
pub struct RunContext {
    pub schema: Arc<Schema>,
    pub original: Dataset,
    pub plan: GroupingPlan,
    /// Set when the grouping plan had to fall back to the original data.
    pub public_fallback: bool,
}

pub fn load_context(cfg: &RunConfig, unsafe_public_fallback: bool) -> Result<RunContext> {
    let codebook = fs::read_to_string(&cfg.codebook)
        .map_err(|e| Error::Config(format!("cannot read codebook {}: {e}", cfg.codebook.display())))?;
    let schema = Schema::from_codebook(&codebook)?;
    let file = fs::File::open(&cfg.original)
        .map_err(|e| Error::Config(format!("cannot read original {}: {e}", cfg.original.display())))?;
    let (original, _) = Dataset::load_csv(schema.clone(), file, LoadPolicy::Strict)?;
    if original.n() == 0 {
        return Err(Error::Config("original dataset has no rows".into()));
    }

    let (public, public_fallback) = match &cfg.public {
        Some(path) => {
            let file = fs::File::open(path)
                .map_err(|e| Error::Config(format!("cannot read public data {}: {e}", path.display())))?;
            let (public, _) = Dataset::load_csv(schema.clone(), file, LoadPolicy::Strict)?;
            if **public.schema() != **original.schema() {
                return Err(Error::Config("public data does not match the codebook".into()));
            }
            (public, false)
        }
        None if unsafe_public_fallback => {
            log::warn!(
                "UNSAFE: no public dataset configured; deriving the grouping plan from the \
                 original data. The plan itself then depends on protected records and the \
                 stated privacy guarantee no longer covers it."
            );
            (original.clone(), true)
        }
        None => {
            return Err(Error::Config(
                "no public dataset configured; supply [data].public or pass \
                 --unsafe-public-fallback to derive the grouping plan from the original data"
                    .into(),
            ))
        }
    };

    let assoc = association_matrix(&discretize(&public))?;
    let plan = group_variables(&assoc, cfg.grouping_threshold, cfg.max_group_size, cfg.max_cells)?;
    Ok(RunContext { schema, original, plan, public_fallback })
}

/// Runs one synthesis bundle in memory. The per-bundle seed folds the grid
/// coordinates into the master seed so bundles never share noise streams.
pub fn synthesize_bundle(
    cfg: &RunConfig,
    ctx: &RunContext,
    spec: &BundleSpec,
) -> Result<SyntheticBundle> {
    let params = spec.params()?;
    let scfg = SynthesisConfig {
        algorithm: spec.algorithm,
        params,
        replicates: cfg.replicates,
        rows: cfg.rows,
        threshold: cfg.threshold,
        master_seed: cfg.seed,
    };
    let rng = SeededRng::new(mix(&[cfg.seed, spec.epsilon.to_bits()]));
    let mut acct = BudgetAccountant::new(params);
    let view = discretize(&ctx.original);
    match spec.algorithm {
        Algorithm::FieldGroups => synth_fieldgroups(&view, &ctx.plan, &scfg, &mut acct, &rng),
        Algorithm::DpSyn => synth_dpsyn(&view, &ctx.plan, &scfg, &mut acct, &rng),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReplicateEntry {
    pub file: String,
    pub epsilon: f64,
    pub delta: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BundleManifest {
    pub algorithm: String,
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub replicates: Vec<ReplicateEntry>,
    pub ledger: Vec<LedgerEntry>,
    pub warnings: Vec<String>,
}

/// Serializes then renames into place; readers never observe a partial file.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_bundle(
    cfg: &RunConfig,
    spec: &BundleSpec,
    bundle: &SyntheticBundle,
) -> Result<BundleManifest> {
    let dir = bundle_dir(cfg, spec);
    fs::create_dir_all(&dir)?;
    let per_rep = split_budget(spec.params()?, cfg.replicates)?;
    let mut entries = Vec::new();
    for (i, rep) in bundle.replicates.iter().enumerate() {
        let file = replicate_file(i as u32);
        atomic_write(&dir.join(&file), rep.to_csv_string()?.as_bytes())?;
        entries.push(ReplicateEntry { file, epsilon: per_rep.epsilon, delta: per_rep.delta });
    }
    let manifest = BundleManifest {
        algorithm: spec.algorithm.name().to_string(),
        epsilon: spec.epsilon,
        delta: spec.delta,
        seed: cfg.seed,
        replicates: entries,
        ledger: bundle.ledger.clone(),
        warnings: bundle.warnings.clone(),
    };
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Config(format!("manifest serialization failed: {e}")))?;
    atomic_write(&dir.join(BUNDLE_MANIFEST), json.as_bytes())?;
    Ok(manifest)
}

pub fn read_bundle_manifest(cfg: &RunConfig, spec: &BundleSpec) -> Result<BundleManifest> {
    let path = bundle_dir(cfg, spec).join(BUNDLE_MANIFEST);
    let text = fs::read_to_string(&path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("malformed manifest {}: {e}", path.display())))
}

/// A bundle counts as complete when its manifest exists and names only files
/// that exist with the expected replicate count.
pub fn bundle_complete(cfg: &RunConfig, spec: &BundleSpec) -> bool {
    let dir = bundle_dir(cfg, spec);
    let Ok(manifest) = read_bundle_manifest(cfg, spec) else {
        return false;
    };
    manifest.replicates.len() == cfg.replicates as usize
        && manifest.replicates.iter().all(|r| dir.join(&r.file).is_file())
}

pub fn load_bundle(cfg: &RunConfig, ctx: &RunContext, spec: &BundleSpec) -> Result<Vec<Dataset>> {
    let dir = bundle_dir(cfg, spec);
    let manifest = read_bundle_manifest(cfg, spec)?;
    let mut reps = Vec::with_capacity(manifest.replicates.len());
    for entry in &manifest.replicates {
        let path = dir.join(&entry.file);
        let file = fs::File::open(&path)
            .map_err(|e| Error::Config(format!("cannot read replicate {}: {e}", path.display())))?;
        let (data, _) = Dataset::load_csv(ctx.schema.clone(), file, LoadPolicy::Strict)?;
        reps.push(data);
    }
    if reps.is_empty() {
        return Err(Error::Config(format!("bundle {} has no replicates", spec.dir_name())));
    }
    Ok(reps)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub seed: u64,
    pub bundles: Vec<String>,
}

pub fn run_manifest_path(cfg: &RunConfig) -> PathBuf {
    cfg.out_dir.join(RUN_MANIFEST)
}

pub fn read_run_manifest(cfg: &RunConfig) -> Result<Option<RunManifest>> {
    let path = run_manifest_path(cfg);
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path)?;
    let manifest = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("malformed run manifest {}: {e}", path.display())))?;
    Ok(Some(manifest))
}

/// Synthesizes every grid cell, reusing bundles already on disk when the
/// output directory matches this config, and refusing to touch it when it
/// does not.
pub fn cmd_synth(cfg: &RunConfig, ctx: &RunContext) -> Result<Vec<BundleSpec>> {
    let hash = cfg.hash();
    let resume = match read_run_manifest(cfg)? {
        Some(m) if m.config_hash == hash => true,
        Some(m) => {
            return Err(Error::Config(format!(
                "output directory {} was produced by a different configuration \
                 (its hash {} does not match this config's {}); point --out at a fresh \
                 directory or restore the original config",
                cfg.out_dir.display(),
                &m.config_hash[..12.min(m.config_hash.len())],
                &hash[..12],
            )))
        }
        None => false,
    };

    let grid = bundle_grid(cfg);
    fs::create_dir_all(bundles_root(cfg))?;
    for spec in &grid {
        if resume && bundle_complete(cfg, spec) {
            log::info!("bundle {} already complete, skipping", spec.dir_name());
            continue;
        }
        log::info!("synthesizing bundle {}", spec.dir_name());
        let bundle = synthesize_bundle(cfg, ctx, spec)?;
        for w in &bundle.warnings {
            log::warn!("{}: {w}", spec.dir_name());
        }
        write_bundle(cfg, spec, &bundle)?;
    }

    let manifest = RunManifest {
        config_hash: hash,
        seed: cfg.seed,
        bundles: grid.iter().map(BundleSpec::dir_name).collect(),
    };
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Config(format!("manifest serialization failed: {e}")))?;
    atomic_write(&run_manifest_path(cfg), json.as_bytes())?;
    Ok(grid)
}
