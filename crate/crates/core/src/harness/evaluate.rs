//! Scores every bundle against the original data and assembles the
//! [`UtilityReport`].
//!
//! A metric that fails on some replicate degrades instead of aborting: the
//! failure becomes a warning, and only when every replicate fails does the
//! metric move to the absent list with its reason. Randomized metrics draw
//! from streams keyed by (algorithm, epsilon index, replicate, metric), so
//! results do not depend on worker count or scheduling.

use std::result::Result as StdResult;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

use crate::cart::{cv_select_cp, CART_CP_GRID, CART_CV_FOLDS, CART_MIN_LEAF};
use crate::data::{discretize, BinnedView, Dataset};
use crate::error::{Error, Result};
use crate::harness::bundles::{bundle_grid, load_bundle, read_bundle_manifest, RunContext};
use crate::harness::config::RunConfig;
use crate::harness::report::{AbsentMetric, BundleResult, UtilityReport};
use crate::metrics::nist::{nist_classification, nist_clustering, nist_regression};
use crate::metrics::propensity::{
    null_pmse_bootstrap, null_pmse_parametric, pmse_ratio, propensity_run, Classifier,
    PropensityRun,
};
use crate::metrics::regression::{correlation_metrics, RegressionSpec};
use crate::metrics::univariate::marginal_means;
use crate::metrics::{MetricCategory, MetricResult, Orientation};
use crate::rng::SeededRng;
use crate::synth::Algorithm;

// Leading stream-id part for evaluation draws; synthesis owns 1 and 2.
const TAG_EVAL: u64 = 3;
const STREAM_CV: u64 = 1;
const STREAM_CART_NULL: u64 = 2;
const METRIC_CLUSTERING: u64 = 10;
const METRIC_CLASSIFICATION: u64 = 11;

/// Keeps exact-copy ratios (pMSE 0) finite on the log scale.
const LOG_RATIO_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug)]
struct MetricDef {
    name: String,
    category: MetricCategory,
    orientation: Orientation,
}

fn def(name: impl Into<String>, category: MetricCategory, orientation: Orientation) -> MetricDef {
    MetricDef { name: name.into(), category, orientation }
}

type MetricRow = (MetricDef, StdResult<f64, String>);

pub struct EvalOutput {
    pub report: UtilityReport,
    /// Some metric value is missing, for a replicate or outright.
    pub degraded: bool,
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default().as_secs()
}

fn algo_tag(a: Algorithm) -> u64 {
    match a {
        Algorithm::FieldGroups => 1,
        Algorithm::DpSyn => 2,
    }
}

/// Metric names for each regression model; a second model over the same
/// family and outcome gets an occurrence suffix.
pub fn regression_metric_names(specs: &[RegressionSpec]) -> Vec<(String, String)> {
    let mut names = Vec::with_capacity(specs.len());
    for (i, spec) in specs.iter().enumerate() {
        let base = format!("{}_{}", spec.family.name(), spec.outcome);
        let dups = specs[..i]
            .iter()
            .filter(|s| s.family == spec.family && s.outcome == spec.outcome)
            .count();
        let base = if dups == 0 { base } else { format!("{base}_{}", dups + 1) };
        names.push((format!("{base}_ci_overlap"), format!("{base}_coef_diff")));
    }
    names
}

pub fn cmd_evaluate(cfg: &RunConfig, ctx: &RunContext) -> Result<EvalOutput> {
    let started = unix_now();
    let master = SeededRng::new(cfg.seed);

    // Config-surface problems abort before any work; only per-replicate
    // metric computation is allowed to degrade.
    for spec in &cfg.regressions {
        spec.resolve(&ctx.schema)?;
    }
    if let Some(cols) = &cfg.nist_regression {
        for (role, name) in
            [("city", &cols.city), ("gender", &cols.gender), ("wage", &cols.wage)]
        {
            if ctx.schema.index_of(name).is_none() {
                return Err(Error::Config(format!(
                    "nist regression {role} column \"{name}\" is not in the schema"
                )));
            }
        }
    }

    let grid = bundle_grid(cfg);
    let mut loaded = Vec::with_capacity(grid.len());
    for spec in &grid {
        let manifest = read_bundle_manifest(cfg, spec)?;
        let reps = load_bundle(cfg, ctx, spec)?;
        loaded.push((*spec, reps, manifest));
    }

    let mut run_warnings: Vec<String> = Vec::new();
    if ctx.public_fallback {
        run_warnings.push(
            "grouping plan was derived from the original data (--unsafe-public-fallback)".into(),
        );
    }

    // One CART complexity parameter for the whole run, tuned on the first
    // (original, replicate) pair, and one bootstrap null to go with it.
    // Retuning per bundle would move the goalposts between epsilons.
    let (cart_cp, cart_null) = if cfg.metrics.joint {
        let cp = match cfg.cart_cp {
            Some(cp) => cp,
            None => {
                let (_, first_reps, _) = &loaded[0];
                let stacked = ctx.original.concat(&first_reps[0])?;
                let mut labels = vec![0.0; ctx.original.n()];
                labels.extend(std::iter::repeat_n(1.0, first_reps[0].n()));
                let predictors: Vec<usize> = (0..stacked.q()).collect();
                let mut cv_rng = master.substream(&[TAG_EVAL, 0, 0, 0, STREAM_CV]);
                cv_select_cp(
                    &stacked,
                    &predictors,
                    &labels,
                    &CART_CP_GRID,
                    CART_CV_FOLDS,
                    CART_MIN_LEAF,
                    &mut cv_rng,
                )?
            }
        };
        let mut null_rng = master.substream(&[TAG_EVAL, 0, 0, 0, STREAM_CART_NULL]);
        let null = match null_pmse_bootstrap(
            &ctx.original,
            &Classifier::cart(cp),
            cfg.null_pmse_reps,
            &mut null_rng,
        ) {
            Ok(v) => Some(v),
            Err(e) => {
                run_warnings.push(format!("CART bootstrap null failed: {e}"));
                None
            }
        };
        (Some(cp), null)
    } else {
        (None, None)
    };

    let orig_view = discretize(&ctx.original);
    let mut results = Vec::with_capacity(loaded.len());
    let mut degraded = false;

    for (spec, reps, manifest) in &loaded {
        let params = spec.params()?;
        let eps_idx = cfg
            .epsilons
            .iter()
            .position(|&e| e == spec.epsilon)
            .expect("grid epsilon comes from the config") as u64;
        let tag = algo_tag(spec.algorithm);

        let rep_outputs: Vec<(Vec<MetricRow>, Vec<String>)> = reps
            .par_iter()
            .enumerate()
            .map(|(ri, rep)| {
                evaluate_replicate(
                    cfg, ctx, &orig_view, ri, rep, tag, eps_idx, cart_cp, cart_null, &master,
                )
            })
            .collect();

        let mut metrics = Vec::new();
        let mut absent = Vec::new();
        let mut warnings = manifest.warnings.clone();
        for (_, rep_warnings) in &rep_outputs {
            warnings.extend(rep_warnings.iter().cloned());
        }

        let defs: Vec<MetricDef> =
            rep_outputs[0].0.iter().map(|(d, _)| d.clone()).collect();
        for (d, mdef) in defs.iter().enumerate() {
            let mut values = Vec::new();
            let mut first_err: Option<String> = None;
            for (ri, (rows, _)) in rep_outputs.iter().enumerate() {
                match &rows[d].1 {
                    Ok(v) => values.push(*v),
                    Err(e) => {
                        if first_err.is_none() {
                            first_err = Some(e.clone());
                        }
                        if rep_outputs.len() > 1 {
                            warnings
                                .push(format!("{}: replicate {ri} absent: {e}", mdef.name));
                        }
                        degraded = true;
                    }
                }
            }
            if values.is_empty() {
                absent.push(AbsentMetric {
                    name: mdef.name.clone(),
                    category: mdef.category,
                    reason: first_err.unwrap_or_else(|| "no replicate produced a value".into()),
                });
            } else {
                match MetricResult::from_replicates(
                    mdef.name.clone(),
                    mdef.category,
                    mdef.orientation,
                    values,
                    params,
                ) {
                    Ok(m) => metrics.push(m),
                    Err(e) => {
                        degraded = true;
                        absent.push(AbsentMetric {
                            name: mdef.name.clone(),
                            category: mdef.category,
                            reason: e.to_string(),
                        });
                    }
                }
            }
        }
        degraded |= !absent.is_empty();

        results.push(BundleResult {
            algorithm: spec.algorithm.name().to_string(),
            epsilon: spec.epsilon,
            delta: spec.delta,
            metrics,
            absent,
            ledger: manifest.ledger.clone(),
            warnings,
        });
    }

    let groups = ctx
        .plan
        .groups
        .iter()
        .map(|g| g.iter().map(|&i| ctx.schema.col(i).name.clone()).collect())
        .collect();
    let report = UtilityReport {
        config_hash: cfg.hash(),
        seed: cfg.seed,
        started_unix: started,
        finished_unix: unix_now(),
        cart_cp,
        cart_null_pmse: cart_null,
        groups,
        results,
        warnings: run_warnings,
    };
    Ok(EvalOutput { report, degraded })
}

#[allow(clippy::too_many_arguments)]
fn evaluate_replicate(
    cfg: &RunConfig,
    ctx: &RunContext,
    orig_view: &BinnedView,
    rep_idx: usize,
    rep: &Dataset,
    tag: u64,
    eps_idx: u64,
    cart_cp: Option<f64>,
    cart_null: Option<f64>,
    master: &SeededRng,
) -> (Vec<MetricRow>, Vec<String>) {
    let mut out: Vec<MetricRow> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();
    let orig = &ctx.original;
    let fail = |e: &Error| e.to_string();

    if cfg.metrics.marginal {
        let chisq = def("marginal_chisq_pvalue", MetricCategory::Marginal, Orientation::LargerBetter);
        let ks = def("marginal_ks_pvalue", MetricCategory::Marginal, Orientation::LargerBetter);
        match marginal_means(orig, rep) {
            Ok(mm) => {
                if mm.degenerate_columns > 0 {
                    warnings.push(format!(
                        "replicate {rep_idx}: {} categorical column(s) degenerated to a single level in the chi-square screen",
                        mm.degenerate_columns
                    ));
                }
                out.push((chisq, mm.chisq_mean.ok_or_else(|| "no categorical columns".to_string())));
                out.push((ks, mm.ks_mean.ok_or_else(|| "no continuous columns".to_string())));
            }
            Err(e) => {
                out.push((chisq, Err(fail(&e))));
                out.push((ks, Err(fail(&e))));
            }
        }
    }

    if cfg.metrics.joint {
        push_propensity_block(
            &mut out,
            &mut warnings,
            "glm",
            propensity_run(orig, rep, &Classifier::Glm),
            None,
            rep_idx,
        );
        let cp = cart_cp.expect("joint metrics imply a tuned cp");
        push_propensity_block(
            &mut out,
            &mut warnings,
            "cart",
            propensity_run(orig, rep, &Classifier::cart(cp)),
            Some(cart_null),
            rep_idx,
        );
    }

    if cfg.metrics.nist {
        let rep_view = discretize(rep);
        let mut rng = master.substream(&[TAG_EVAL, tag, eps_idx, rep_idx as u64, METRIC_CLUSTERING]);
        out.push((
            def("nist_clustering", MetricCategory::Joint, Orientation::SmallerBetter),
            nist_clustering(orig_view, &rep_view, cfg.clustering_reps, &mut rng)
                .map_err(|e| fail(&e)),
        ));
        let mut rng =
            master.substream(&[TAG_EVAL, tag, eps_idx, rep_idx as u64, METRIC_CLASSIFICATION]);
        out.push((
            def("nist_classification", MetricCategory::Joint, Orientation::SmallerBetter),
            nist_classification(orig_view, &rep_view, cfg.classification_reps, &mut rng)
                .map_err(|e| fail(&e)),
        ));
    }

    if cfg.metrics.correlation && !cfg.regressions.is_empty() {
        let names = regression_metric_names(&cfg.regressions);
        match correlation_metrics(orig, rep, &cfg.regressions) {
            Ok(comparisons) => {
                for (comp, (ci_name, diff_name)) in comparisons.iter().zip(&names) {
                    let ci = def(ci_name, MetricCategory::Correlation, Orientation::LargerBetter);
                    let diff =
                        def(diff_name, MetricCategory::Correlation, Orientation::SmallerBetter);
                    match &comp.agreement {
                        Ok(a) => {
                            out.push((ci, Ok(a.mean_ci_overlap)));
                            out.push((diff, Ok(a.mean_std_coef_diff)));
                        }
                        Err(reason) => {
                            out.push((ci, Err(reason.clone())));
                            out.push((diff, Err(reason.clone())));
                        }
                    }
                }
            }
            Err(e) => {
                let msg = fail(&e);
                for (ci_name, diff_name) in &names {
                    out.push((
                        def(ci_name, MetricCategory::Correlation, Orientation::LargerBetter),
                        Err(msg.clone()),
                    ));
                    out.push((
                        def(diff_name, MetricCategory::Correlation, Orientation::SmallerBetter),
                        Err(msg.clone()),
                    ));
                }
            }
        }
    }

    if cfg.metrics.nist {
        if let Some(cols) = &cfg.nist_regression {
            out.push((
                def("nist_regression", MetricCategory::Correlation, Orientation::SmallerBetter),
                nist_regression(orig, rep, &cols.city, &cols.gender, &cols.wage)
                    .map_err(|e| fail(&e)),
            ));
        }
    }

    (out, warnings)
}

/// pMSE, its null ratio (plain and logged) and SPECKS for one classifier.
/// `fixed_null`: None means the parametric null from the fit's own parameter
/// count (GLM); Some carries the shared CART bootstrap null, where None
/// inside means that null could not be computed.
fn push_propensity_block(
    out: &mut Vec<MetricRow>,
    warnings: &mut Vec<String>,
    which: &str,
    run: Result<PropensityRun>,
    fixed_null: Option<Option<f64>>,
    rep_idx: usize,
) {
    use crate::metrics::propensity::specks;

    let pmse_def = def(format!("pmse_{which}"), MetricCategory::Joint, Orientation::SmallerBetter);
    let ratio_def =
        def(format!("pmse_ratio_{which}"), MetricCategory::Joint, Orientation::SmallerBetter);
    let log_def =
        def(format!("log_pmse_ratio_{which}"), MetricCategory::Joint, Orientation::SmallerBetter);
    let specks_def =
        def(format!("specks_{which}"), MetricCategory::Joint, Orientation::SmallerBetter);

    let run = match run {
        Ok(run) => run,
        Err(e) => {
            let msg = e.to_string();
            for d in [pmse_def, ratio_def, log_def, specks_def] {
                out.push((d, Err(msg.clone())));
            }
            return;
        }
    };
    for note in &run.notes {
        warnings.push(format!("replicate {rep_idx} {which} propensity: {note}"));
    }
    if run.unseen_levels > 0 {
        warnings.push(format!(
            "replicate {rep_idx} {which} propensity: {} lookups hit levels unseen in training",
            run.unseen_levels
        ));
    }

    let observed = run.pmse();
    out.push((pmse_def, Ok(observed)));

    let null = match fixed_null {
        None => match run.k {
            Some(k) => null_pmse_parametric(k, run.c, run.n_total()).map_err(|e| e.to_string()),
            None => Err("fit reports no parameter count for the parametric null".to_string()),
        },
        Some(Some(v)) => Ok(v),
        Some(None) => Err("shared bootstrap null was unavailable".to_string()),
    };
    match null {
        Ok(null) => match pmse_ratio(observed, null) {
            Ok(ratio) => {
                out.push((ratio_def, Ok(ratio)));
                out.push((log_def, Ok(ratio.max(LOG_RATIO_FLOOR).ln())));
            }
            Err(e) => {
                let msg = e.to_string();
                out.push((ratio_def, Err(msg.clone())));
                out.push((log_def, Err(msg)));
            }
        },
        Err(msg) => {
            out.push((ratio_def, Err(msg.clone())));
            out.push((log_def, Err(msg)));
        }
    }
    out.push((specks_def, specks(&run).map_err(|e| e.to_string())));
}
