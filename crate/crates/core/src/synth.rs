//! The two synthesis algorithms: per-group joint histograms under Laplace
//! noise, and 1/2/3-way marginal stacks under Gaussian noise with
//! consistency projection and IPF reconstruction.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::assoc::GroupingPlan;
use crate::budget::{split_budget, BudgetAccountant, LedgerEntry, PrivacyParams};
use crate::consistency::enforce_consistency;
use crate::data::{BinnedView, Column, Dataset};
use crate::error::{Error, Result};
use crate::ipf::{fit_joint, IPF_MAX_ITERS, IPF_TOL};
use crate::marginal::{build_marginal, decode_cell, sample_group, MarginalTable};
use crate::mechanisms::{gaussian_sigma, sample_laplace};
use crate::rng::SeededRng;
use crate::schema::{ColumnKind, Schema};

// Leading stream-id part per algorithm; the rest is
// [replicate, group, stage, detail].
const TAG_FIELDGROUPS: u64 = 1;
const TAG_DPSYN: u64 = 2;
const STAGE_NOISE: u64 = 0;
const STAGE_SAMPLE: u64 = 1;
const STAGE_REALIZE: u64 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    FieldGroups,
    DpSyn,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::FieldGroups => "fieldgroups",
            Algorithm::DpSyn => "dpsyn",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowTarget {
    MatchOriginal,
    Fixed(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdMode {
    /// Scale-aware default: (k/eps_r)*log10(cells) under Laplace noise,
    /// 3 sigma under Gaussian noise.
    Auto,
    Fixed(f64),
}

#[derive(Clone, Debug)]
pub struct SynthesisConfig {
    pub algorithm: Algorithm,
    pub params: PrivacyParams,
    pub replicates: u32,
    pub rows: RowTarget,
    pub threshold: ThresholdMode,
    pub master_seed: u64,
}

impl SynthesisConfig {
    fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::invalid("replicate count must be at least 1"));
        }
        if let RowTarget::Fixed(0) = self.rows {
            return Err(Error::invalid("synthetic row count must be at least 1"));
        }
        if let ThresholdMode::Fixed(t) = self.threshold {
            if !t.is_finite() {
                return Err(Error::invalid("threshold must be finite"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticBundle {
    pub replicates: Vec<Dataset>,
    pub per_replicate_params: PrivacyParams,
    pub ledger: Vec<LedgerEntry>,
    pub warnings: Vec<String>,
}

struct GroupInfo {
    cols: Vec<usize>,
    cards: Vec<u32>,
    cells: u64,
}

fn plan_groups(view: &BinnedView, plan: &GroupingPlan) -> Result<Vec<GroupInfo>> {
    let q = view.q();
    let mut seen = vec![false; q];
    let mut infos = Vec::with_capacity(plan.groups.len());
    for group in &plan.groups {
        if group.is_empty() {
            return Err(Error::invalid("grouping plan contains an empty group"));
        }
        let mut cols = group.clone();
        cols.sort_unstable();
        for &c in &cols {
            if c >= q || seen[c] {
                return Err(Error::invalid("grouping plan must partition the schema columns"));
            }
            seen[c] = true;
        }
        let cards: Vec<u32> = cols.iter().map(|&c| view.cardinality(c)).collect();
        let cells = cards.iter().fold(1u64, |acc, &c| acc.saturating_mul(c as u64));
        infos.push(GroupInfo { cols, cards, cells });
    }
    if !seen.into_iter().all(|s| s) {
        return Err(Error::invalid("grouping plan must cover every schema column"));
    }
    Ok(infos)
}

fn target_rows(view: &BinnedView, rows: RowTarget) -> usize {
    match rows {
        RowTarget::MatchOriginal => view.n(),
        RowTarget::Fixed(n) => n,
    }
}

/// Zero-suppression cutoff for Laplace-noised counts: noise scale times the
/// decimal order of the table size.
pub fn fieldgroups_threshold(group_count: usize, eps_r: f64, cells: u64) -> f64 {
    (group_count as f64 / eps_r) * (cells as f64).log10()
}

/// Per-group joint histograms, Laplace noise of scale k/eps_r, rounding,
/// zero-suppression, then weighted resampling. Spends (epsilon, 0) once for
/// the whole bundle; replicates divide it evenly.
pub fn synth_fieldgroups(
    view: &BinnedView,
    plan: &GroupingPlan,
    cfg: &SynthesisConfig,
    acct: &mut BudgetAccountant,
    rng: &SeededRng,
) -> Result<SyntheticBundle> {
    cfg.validate()?;
    if cfg.params.delta != 0.0 {
        return Err(Error::invalid(
            "fieldgroups is a pure-DP mechanism; allocate delta = 0",
        ));
    }
    let groups = plan_groups(view, plan)?;
    let k = groups.len();
    let m = cfg.replicates;
    let eps_r = cfg.params.epsilon / m as f64;
    let n_star = target_rows(view, cfg.rows);

    acct.spend(&format!("fieldgroups bundle (m={m})"), cfg.params)?;

    let clean: Vec<MarginalTable> = groups
        .iter()
        .map(|g| build_marginal(view, &g.cols, g.cells))
        .collect::<Result<_>>()?;

    let mut warnings = Vec::new();
    let mut replicates = Vec::with_capacity(m as usize);
    for r in 0..m as u64 {
        let mut draws = Vec::with_capacity(k);
        for j in 0..groups.len() {
            let weights = sanitize_fieldgroups_group(
                &clean[j],
                k,
                eps_r,
                cfg.threshold,
                rng,
                r,
                j as u64,
                &mut warnings,
            );
            let mut srng = rng.substream(&[TAG_FIELDGROUPS, r, j as u64, STAGE_SAMPLE, 0]);
            draws.push(sample_group(&weights, n_star, &mut srng)?);
        }
        replicates.push(assemble_replicate(
            view.schema(),
            &groups,
            &draws,
            n_star,
            rng,
            TAG_FIELDGROUPS,
            r,
        )?);
    }

    Ok(SyntheticBundle {
        replicates,
        per_replicate_params: split_budget(cfg.params, m)?,
        ledger: acct.ledger().to_vec(),
        warnings,
    })
}

/// The privacy boundary for fieldgroups: everything after the returned
/// weights is post-processing of the noisy histogram.
#[allow(clippy::too_many_arguments)]
fn sanitize_fieldgroups_group(
    clean: &MarginalTable,
    k: usize,
    eps_r: f64,
    threshold: ThresholdMode,
    rng: &SeededRng,
    replicate: u64,
    group: u64,
    warnings: &mut Vec<String>,
) -> Vec<f64> {
    let scale = k as f64 / eps_r;
    let mut nrng = rng.substream(&[TAG_FIELDGROUPS, replicate, group, STAGE_NOISE, 0]);
    let thr = match threshold {
        ThresholdMode::Auto => fieldgroups_threshold(k, eps_r, clean.cells() as u64),
        ThresholdMode::Fixed(t) => t,
    };
    let mut weights: Vec<f64> = clean
        .counts()
        .iter()
        .map(|&c| {
            let noisy = (c + sample_laplace(scale, &mut nrng)).round().max(0.0);
            if noisy <= thr {
                0.0
            } else {
                noisy
            }
        })
        .collect();
    if weights.iter().all(|&w| w == 0.0) {
        let msg = format!(
            "replicate {replicate}: group {group} zeroed out entirely; sampling uniformly"
        );
        log::warn!("{msg}");
        warnings.push(msg);
        weights.iter_mut().for_each(|w| *w = 1.0);
    }
    weights
}

/// All 1-, 2-, 3-way intra-group marginals under Gaussian noise calibrated
/// for the stacked vector (l2 sensitivity sqrt(M) over M tables), then
/// zero-suppression, consistency projection, IPF, and sampling. Spends
/// (epsilon, delta) once for the whole bundle.
pub fn synth_dpsyn(
    view: &BinnedView,
    plan: &GroupingPlan,
    cfg: &SynthesisConfig,
    acct: &mut BudgetAccountant,
    rng: &SeededRng,
) -> Result<SyntheticBundle> {
    cfg.validate()?;
    if cfg.params.delta <= 0.0 {
        return Err(Error::invalid("dpsyn needs delta > 0 for its gaussian noise"));
    }
    let groups = plan_groups(view, plan)?;
    let m = cfg.replicates;
    let per_rep = split_budget(cfg.params, m)?;
    let n_star = target_rows(view, cfg.rows);

    let specs: Vec<Vec<Vec<usize>>> = groups.iter().map(|g| subsets_up_to_3(&g.cols)).collect();
    let table_count: usize = specs.iter().map(|s| s.len()).sum();
    let sigma = gaussian_sigma((table_count as f64).sqrt(), per_rep)?;

    acct.spend(&format!("dpsyn bundle (m={m})"), cfg.params)?;

    let clean: Vec<Vec<MarginalTable>> = groups
        .iter()
        .zip(&specs)
        .map(|(g, spec)| {
            spec.iter()
                .map(|cols| build_marginal(view, cols, g.cells))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let thr = match cfg.threshold {
        ThresholdMode::Auto => 3.0 * sigma,
        ThresholdMode::Fixed(t) => t,
    };

    let mut warnings = Vec::new();
    let mut replicates = Vec::with_capacity(m as usize);
    for r in 0..m as u64 {
        let mut draws = Vec::with_capacity(groups.len());
        for (j, info) in groups.iter().enumerate() {
            let noisy = sanitize_dpsyn_group(&clean[j], sigma, thr, rng, r, j as u64);
            let consistent = enforce_consistency(&noisy);
            let fit = fit_joint(&info.cols, &info.cards, &consistent, IPF_MAX_ITERS, IPF_TOL)?;
            if !fit.converged {
                let msg = format!(
                    "replicate {r}: group {j} ipf stopped at max error {:.3e} after {} iterations",
                    fit.max_err, fit.iterations
                );
                log::warn!("{msg}");
                warnings.push(msg);
            }
            let mut weights = fit.joint.counts().to_vec();
            if weights.iter().all(|&w| w <= 0.0) {
                let msg = format!(
                    "replicate {r}: group {j} zeroed out entirely; sampling uniformly"
                );
                log::warn!("{msg}");
                warnings.push(msg);
                weights.iter_mut().for_each(|w| *w = 1.0);
            }
            let mut srng = rng.substream(&[TAG_DPSYN, r, j as u64, STAGE_SAMPLE, 0]);
            draws.push(sample_group(&weights, n_star, &mut srng)?);
        }
        replicates.push(assemble_replicate(
            view.schema(),
            &groups,
            &draws,
            n_star,
            rng,
            TAG_DPSYN,
            r,
        )?);
    }

    Ok(SyntheticBundle {
        replicates,
        per_replicate_params: per_rep,
        ledger: acct.ledger().to_vec(),
        warnings,
    })
}

/// The privacy boundary for dpsyn: adds calibrated noise to every table and
/// suppresses sub-threshold cells. Everything downstream is post-processing.
fn sanitize_dpsyn_group(
    clean: &[MarginalTable],
    sigma: f64,
    thr: f64,
    rng: &SeededRng,
    replicate: u64,
    group: u64,
) -> Vec<MarginalTable> {
    use rand_distr::{Distribution, Normal};
    let normal = Normal::new(0.0, sigma).expect("sigma is positive and finite");
    clean
        .iter()
        .enumerate()
        .map(|(t, table)| {
            let mut nrng = rng.substream(&[TAG_DPSYN, replicate, group, STAGE_NOISE, t as u64]);
            let counts: Vec<f64> = table
                .counts()
                .iter()
                .map(|&c| {
                    let noisy = c + normal.sample(&mut nrng);
                    if noisy < thr {
                        0.0
                    } else {
                        noisy
                    }
                })
                .collect();
            MarginalTable::new(table.columns().to_vec(), table.cards().to_vec(), counts)
                .expect("shape unchanged")
        })
        .collect()
}

/// Ascending-order subsets of sizes 1..=3, smallest sizes first.
fn subsets_up_to_3(cols: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let n = cols.len();
    for i in 0..n {
        out.push(vec![cols[i]]);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(vec![cols[i], cols[j]]);
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            for l in (j + 1)..n {
                out.push(vec![cols[i], cols[j], cols[l]]);
            }
        }
    }
    out
}

/// Turns per-group cell draws into a full-schema dataset; continuous bins
/// become uniform draws within the bin interval.
fn assemble_replicate(
    schema: &Arc<Schema>,
    groups: &[GroupInfo],
    draws: &[Vec<usize>],
    n_star: usize,
    rng: &SeededRng,
    tag: u64,
    replicate: u64,
) -> Result<Dataset> {
    use rand::Rng;
    let mut cols: Vec<Option<Column>> = (0..schema.len()).map(|_| None).collect();
    for (j, info) in groups.iter().enumerate() {
        let mut bufs: Vec<Vec<u32>> = info.cols.iter().map(|_| Vec::with_capacity(n_star)).collect();
        for &cell in &draws[j] {
            for (t, code) in decode_cell(&info.cards, cell).into_iter().enumerate() {
                bufs[t].push(code);
            }
        }
        for (t, &c) in info.cols.iter().enumerate() {
            let buf = std::mem::take(&mut bufs[t]);
            let column = match schema.col(c).kind {
                ColumnKind::Categorical { .. } => Column::Cat(buf),
                ColumnKind::Continuous { min, max, bin_count } => {
                    let mut crng =
                        rng.substream(&[tag, replicate, j as u64, STAGE_REALIZE, c as u64]);
                    let width = (max - min) / bin_count as f64;
                    let vals = buf
                        .into_iter()
                        .map(|bin| {
                            let u: f64 = crng.random();
                            (min + (bin as f64 + u) * width).clamp(min, max)
                        })
                        .collect();
                    Column::Cont(vals)
                }
            };
            cols[c] = Some(column);
        }
    }
    let cols = cols
        .into_iter()
        .map(|c| c.ok_or_else(|| Error::invalid("grouping plan left a column unassigned")))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(schema.clone(), cols)
}
