//! Agreement between regressions fit on original and synthetic data:
//! confidence-interval overlap and standardized coefficient differences,
//! averaged per model across all coefficients including the intercept.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::data::{Column, Dataset};
use crate::error::{Error, Result};
use crate::glm::{
    build_design, fit_glm, glm_confidence_intervals, ConfidenceInterval, Family, FittedGLM,
    GLM_MAX_ITER, GLM_TOL,
};
use crate::schema::{ColumnKind, Schema};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CiOverlap {
    /// The paper's interval-overlap measure; negative when disjoint.
    pub raw: f64,
    pub clamped: f64,
}

pub fn ci_overlap(orig: ConfidenceInterval, synth: ConfidenceInterval) -> Result<CiOverlap> {
    let wo = orig.upper - orig.lower;
    let ws = synth.upper - synth.lower;
    if !(wo > 0.0) || !(ws > 0.0) {
        return Err(Error::invalid("interval overlap needs non-degenerate intervals"));
    }
    let shared = orig.upper.min(synth.upper) - orig.lower.max(synth.lower);
    let raw = 0.5 * (shared / wo + shared / ws);
    Ok(CiOverlap { raw, clamped: raw.max(0.0) })
}

pub fn std_coef_diff(beta_o: f64, beta_s: f64, se_o: f64) -> Result<f64> {
    if !(se_o > 0.0) || !se_o.is_finite() {
        return Err(Error::invalid("standardized difference needs a positive se"));
    }
    Ok((beta_o - beta_s).abs() / se_o)
}

/// One regression the evaluation refits on both datasets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionSpec {
    pub family: Family,
    pub outcome: String,
    pub predictors: Vec<String>,
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        match s.as_str() {
            "logistic" => Ok(Family::Logistic),
            "poisson" => Ok(Family::Poisson),
            other => Err(serde::de::Error::custom(format!(
                "unknown family {other:?}; expected logistic or poisson"
            ))),
        }
    }
}

impl RegressionSpec {
    pub fn resolve(&self, schema: &Schema) -> Result<(usize, Vec<usize>)> {
        let outcome = schema
            .index_of(&self.outcome)
            .ok_or_else(|| Error::invalid(format!("unknown outcome column {:?}", self.outcome)))?;
        let mut predictors = Vec::with_capacity(self.predictors.len());
        for name in &self.predictors {
            let i = schema
                .index_of(name)
                .ok_or_else(|| Error::invalid(format!("unknown predictor column {name:?}")))?;
            if i == outcome {
                return Err(Error::invalid(format!(
                    "column {name:?} cannot be both outcome and predictor"
                )));
            }
            if predictors.contains(&i) {
                return Err(Error::invalid(format!("duplicate predictor column {name:?}")));
            }
            predictors.push(i);
        }
        if predictors.is_empty() {
            return Err(Error::invalid("regression needs at least one predictor"));
        }
        Ok((outcome, predictors))
    }
}

/// Response vector for a regression. Logistic outcomes must be two-level
/// categorical columns (the level code is the response). Poisson outcomes
/// are count-valued: either a categorical column whose level names parse as
/// nonnegative integers, or a continuous column left to fit-time checks.
fn extract_response(data: &Dataset, outcome: usize, family: Family) -> Result<Vec<f64>> {
    let spec = data.schema().col(outcome);
    match (family, data.column(outcome)) {
        (Family::Logistic, Column::Cat(codes)) => {
            if spec.cardinality() != 2 {
                return Err(Error::invalid(format!(
                    "logistic outcome {:?} must have exactly two levels",
                    spec.name
                )));
            }
            Ok(codes.iter().map(|&c| c as f64).collect())
        }
        (Family::Logistic, Column::Cont(_)) => Err(Error::invalid(format!(
            "logistic outcome {:?} must be categorical",
            spec.name
        ))),
        (Family::Poisson, Column::Cat(codes)) => {
            let ColumnKind::Categorical { levels, .. } = &spec.kind else { unreachable!() };
            let parsed: Vec<f64> = levels
                .iter()
                .map(|l| l.trim().parse::<u32>().map(f64::from))
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| {
                    Error::invalid(format!(
                        "poisson outcome {:?} has non-numeric level names",
                        spec.name
                    ))
                })?;
            Ok(codes.iter().map(|&c| parsed[c as usize]).collect())
        }
        (Family::Poisson, Column::Cont(values)) => Ok(values.to_vec()),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoefficientAgreement {
    pub mean_ci_overlap: f64,
    pub mean_ci_overlap_clamped: f64,
    pub mean_std_coef_diff: f64,
    /// Coefficients present in both fits and averaged over.
    pub aligned: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelComparison {
    pub spec: RegressionSpec,
    /// Err carries the reason the model is reported as absent.
    pub agreement: std::result::Result<CoefficientAgreement, String>,
}

fn fit_one(data: &Dataset, outcome: usize, predictors: &[usize], family: Family) -> Result<FittedGLM> {
    let y = extract_response(data, outcome, family)?;
    let design = build_design(data, predictors)?;
    fit_glm(&design, &y, family, GLM_MAX_ITER, GLM_TOL)
}

fn compare_one(
    orig: &Dataset,
    synth: &Dataset,
    spec: &RegressionSpec,
) -> std::result::Result<CoefficientAgreement, String> {
    let (outcome, predictors) =
        spec.resolve(orig.schema()).map_err(|e| e.to_string())?;
    let y_s = extract_response(synth, outcome, spec.family).map_err(|e| e.to_string())?;
    if y_s.windows(2).all(|w| w[0] == w[1]) {
        return Err("no outcome variation".to_string());
    }
    let fit_o = fit_one(orig, outcome, &predictors, spec.family)
        .map_err(|e| format!("original fit failed: {e}"))?;
    let fit_s = fit_one(synth, outcome, &predictors, spec.family)
        .map_err(|e| format!("synthetic fit failed: {e}"))?;
    if !fit_o.converged {
        return Err("original fit did not converge".to_string());
    }
    if !fit_s.converged {
        return Err("synthetic fit did not converge".to_string());
    }
    let ci_o = glm_confidence_intervals(&fit_o).map_err(|e| e.to_string())?;
    let ci_s = glm_confidence_intervals(&fit_s).map_err(|e| e.to_string())?;
    let synth_index: HashMap<_, usize> =
        fit_s.cols.iter().cloned().zip(0..).collect();
    let mut overlaps = Vec::new();
    let mut overlaps_clamped = Vec::new();
    let mut diffs = Vec::new();
    for (j, key) in fit_o.cols.iter().enumerate() {
        let Some(&js) = synth_index.get(key) else { continue };
        let io = ci_overlap(ci_o[j], ci_s[js]).map_err(|e| e.to_string())?;
        overlaps.push(io.raw);
        overlaps_clamped.push(io.clamped);
        diffs.push(
            std_coef_diff(
                fit_o.coefficients[j],
                fit_s.coefficients[js],
                fit_o.standard_errors[j],
            )
            .map_err(|e| e.to_string())?,
        );
    }
    if overlaps.is_empty() {
        return Err("no coefficients shared between the fits".to_string());
    }
    let mean = crate::stats::mean;
    Ok(CoefficientAgreement {
        mean_ci_overlap: mean(&overlaps),
        mean_ci_overlap_clamped: mean(&overlaps_clamped),
        mean_std_coef_diff: mean(&diffs),
        aligned: overlaps.len(),
    })
}

/// Refit every spec on both datasets. Per-model failures (non-convergence,
/// constant synthetic outcome) mark that model absent with a reason rather
/// than failing the whole battery.
pub fn correlation_metrics(
    orig: &Dataset,
    synth: &Dataset,
    specs: &[RegressionSpec],
) -> Result<Vec<ModelComparison>> {
    if **orig.schema() != **synth.schema() {
        return Err(Error::invalid("regression comparison needs a shared schema"));
    }
    if specs.is_empty() {
        return Err(Error::invalid("no regression specs given"));
    }
    for spec in specs {
        spec.resolve(orig.schema())?;
    }
    Ok(specs
        .iter()
        .map(|spec| ModelComparison {
            spec: spec.clone(),
            agreement: compare_one(orig, synth, spec),
        })
        .collect())
}
