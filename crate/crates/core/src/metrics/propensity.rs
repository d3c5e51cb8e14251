//! Propensity-score discrimination: how well a classifier can tell original
//! rows from synthetic ones. The pMSE family compares squared deviation of
//! predicted membership probabilities from the synthetic share c; SPECKS
//! applies the two-sample KS distance to the same scores.

use rand::Rng;

use crate::cart::{fit_cart, CART_MIN_LEAF};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::glm::{build_design, fit_glm, Family, GLM_MAX_ITER, GLM_TOL};
use crate::stats::ks_statistic;

pub const NULL_PMSE_REPS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Classifier {
    Glm,
    Cart { cp: f64, min_leaf: usize },
}

impl Classifier {
    pub fn cart(cp: f64) -> Self {
        Classifier::Cart { cp, min_leaf: CART_MIN_LEAF }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Classifier::Glm => "glm",
            Classifier::Cart { .. } => "cart",
        }
    }
}

/// Scores from one fitted membership classifier, split back into the two
/// source datasets.
#[derive(Clone, Debug)]
pub struct PropensityRun {
    pub classifier: &'static str,
    pub scores_original: Vec<f64>,
    pub scores_synthetic: Vec<f64>,
    /// Synthetic share n*/N of the stacked fit.
    pub c: f64,
    /// Parameter count of the GLM fit; absent for trees.
    pub k: Option<usize>,
    pub cp: Option<f64>,
    pub unseen_levels: u64,
    pub notes: Vec<String>,
}

impl PropensityRun {
    pub fn n_total(&self) -> usize {
        self.scores_original.len() + self.scores_synthetic.len()
    }

    pub fn pmse(&self) -> f64 {
        let sq: f64 = self
            .scores_original
            .iter()
            .chain(&self.scores_synthetic)
            .map(|p| (p - self.c) * (p - self.c))
            .sum();
        sq / self.n_total() as f64
    }
}

struct MembershipFit {
    scores: Vec<f64>,
    /// GLM parameter count; absent for trees.
    k: Option<usize>,
    unseen_levels: u64,
    notes: Vec<String>,
}

fn fit_membership(
    stacked: &Dataset,
    labels: &[f64],
    classifier: &Classifier,
) -> Result<MembershipFit> {
    let predictors: Vec<usize> = (0..stacked.q()).collect();
    match classifier {
        Classifier::Glm => {
            let design = build_design(stacked, &predictors)?;
            let fit = fit_glm(&design, labels, Family::Logistic, GLM_MAX_ITER, GLM_TOL)?;
            let mut notes = Vec::new();
            if fit.separation {
                notes.push("membership glm separated; scores from capped fit".to_string());
            } else if !fit.converged {
                notes.push("membership glm did not converge".to_string());
            }
            if fit.ridged {
                notes.push("membership glm used ridge fallback".to_string());
            }
            let scores = fit.predict(&design);
            Ok(MembershipFit { scores, k: Some(fit.k()), unseen_levels: 0, notes })
        }
        Classifier::Cart { cp, min_leaf } => {
            let tree = fit_cart(stacked, &predictors, labels, *cp, *min_leaf)?;
            let pred = tree.predict(stacked);
            Ok(MembershipFit {
                scores: pred.scores,
                k: None,
                unseen_levels: pred.unseen_levels,
                notes: Vec::new(),
            })
        }
    }
}

/// Stack original (label 0) on synthetic (label 1), fit the membership
/// classifier, and score every row.
pub fn propensity_run(
    orig: &Dataset,
    synth: &Dataset,
    classifier: &Classifier,
) -> Result<PropensityRun> {
    if orig.n() == 0 || synth.n() == 0 {
        return Err(Error::invalid("propensity run needs non-empty datasets"));
    }
    let stacked = orig.concat(synth)?;
    let mut labels = vec![0.0; orig.n()];
    labels.extend(std::iter::repeat_n(1.0, synth.n()));
    let fit = fit_membership(&stacked, &labels, classifier)?;
    let cp = match classifier {
        Classifier::Cart { cp, .. } => Some(*cp),
        Classifier::Glm => None,
    };
    Ok(PropensityRun {
        classifier: classifier.name(),
        scores_original: fit.scores[..orig.n()].to_vec(),
        scores_synthetic: fit.scores[orig.n()..].to_vec(),
        c: synth.n() as f64 / stacked.n() as f64,
        k: fit.k,
        cp,
        unseen_levels: fit.unseen_levels,
        notes: fit.notes,
    })
}

pub fn pmse(scores: &[f64], c: f64) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::invalid("pmse needs at least one score"));
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::invalid("pmse share c must lie strictly inside (0,1)"));
    }
    if scores.iter().any(|p| !p.is_finite()) {
        return Err(Error::invalid("pmse scores must be finite"));
    }
    Ok(scores.iter().map(|p| (p - c) * (p - c)).sum::<f64>() / scores.len() as f64)
}

/// Expected pMSE when the classifier has nothing to find: (k-1)(1-c)^2 c / N.
pub fn null_pmse_parametric(k: usize, c: f64, n_total: usize) -> Result<f64> {
    if k < 1 {
        return Err(Error::invalid("parameter count must be at least 1"));
    }
    if n_total < 1 {
        return Err(Error::invalid("n_total must be positive"));
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::invalid("share c must lie strictly inside (0,1)"));
    }
    Ok((k - 1) as f64 * (1.0 - c) * (1.0 - c) * c / n_total as f64)
}

/// Empirical null: stack the original (labeled 0) with an equal-size
/// bootstrap resample of it (labeled 1), refit, take the mean pMSE over
/// replicates. Only the resampled half fluctuates, matching the sampling
/// model behind the parametric expectation (a fixed original compared
/// against draws from the same distribution); resampling both halves
/// instead would double the expected pMSE.
pub fn null_pmse_bootstrap<R: Rng>(
    original: &Dataset,
    classifier: &Classifier,
    reps: usize,
    rng: &mut R,
) -> Result<f64> {
    let n = original.n();
    if n < 2 {
        return Err(Error::invalid("insufficient rows for a bootstrap null"));
    }
    if reps == 0 {
        return Err(Error::invalid("bootstrap needs at least one replicate"));
    }
    let mut labels = vec![0.0; n];
    labels.extend(std::iter::repeat_n(1.0, n));
    let mut acc = 0.0;
    for _ in 0..reps {
        let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let boot = original.take_rows(&idx);
        let stacked = original.concat(&boot)?;
        let fit = fit_membership(&stacked, &labels, classifier)?;
        acc += pmse(&fit.scores, 0.5)?;
    }
    Ok(acc / reps as f64)
}

pub fn pmse_ratio(observed_mean: f64, null_mean: f64) -> Result<f64> {
    if !(null_mean > 0.0) {
        return Err(Error::invalid("null pmse must be positive"));
    }
    if !(observed_mean >= 0.0) {
        return Err(Error::invalid("observed pmse must be nonnegative"));
    }
    Ok(observed_mean / null_mean)
}

/// Two-sample KS distance between the original and synthetic score vectors.
pub fn specks(run: &PropensityRun) -> Result<f64> {
    ks_statistic(&run.scores_original, &run.scores_synthetic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Column;
    use crate::rng::SeededRng;
    use crate::schema::Schema;
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn schema() -> Arc<Schema> {
        Schema::from_codebook(
            "kind | categorical | a,b,c\nlevel | continuous | 0 | 1 | 4\n",
        )
        .unwrap()
    }

    fn fixture(seed: u64, n: usize) -> Dataset {
        let mut rng = SeededRng::new(seed).stream(0);
        let mut kind = Vec::with_capacity(n);
        let mut level = Vec::with_capacity(n);
        for _ in 0..n {
            let k: u32 = rng.random_range(0..3);
            kind.push(k);
            level.push((rng.random::<f64>() + k as f64).min(2.9) / 3.0);
        }
        Dataset::new(schema(), vec![Column::Cat(kind), Column::Cont(level)]).unwrap()
    }

    #[test]
    fn pmse_formula() {
        assert_eq!(pmse(&[0.3; 10], 0.3).unwrap(), 0.0);
        let alternating: Vec<f64> = (0..10).map(|i| (i % 2) as f64).collect();
        assert_eq!(pmse(&alternating, 0.5).unwrap(), 0.25);
        let mut rng = SeededRng::new(5).stream(0);
        let scores: Vec<f64> = (0..57).map(|_| rng.random()).collect();
        let c = 0.37;
        let by_hand = scores.iter().map(|p| (p - c).powi(2)).sum::<f64>() / 57.0;
        assert!((pmse(&scores, c).unwrap() - by_hand).abs() < 1e-15);
        assert!(pmse(&[], 0.5).is_err());
        assert!(pmse(&[0.5], 0.0).is_err());
        assert!(pmse(&[0.5], 1.0).is_err());
    }

    #[test]
    fn parametric_null_formula() {
        assert_eq!(null_pmse_parametric(1, 0.5, 100).unwrap(), 0.0);
        assert_relative_eq!(null_pmse_parametric(2, 0.5, 200).unwrap(), 0.000625);
        let once = null_pmse_parametric(5, 0.3, 500).unwrap();
        let doubled = null_pmse_parametric(5, 0.3, 1000).unwrap();
        assert_relative_eq!(once, 2.0 * doubled);
        assert!(null_pmse_parametric(0, 0.5, 10).is_err());
        assert!(null_pmse_parametric(2, 0.5, 0).is_err());
    }

    #[test]
    fn ratio_guards_and_identity() {
        assert_eq!(pmse_ratio(0.25, 0.25).unwrap(), 1.0);
        let r = pmse_ratio(0.25 * std::f64::consts::E, 0.25).unwrap();
        assert_relative_eq!(r.ln(), 1.0, epsilon = 1e-12);
        assert!(pmse_ratio(0.1, 0.0).is_err());
        assert!(pmse_ratio(-0.1, 0.5).is_err());
    }

    #[test]
    fn exact_copy_is_indistinguishable() {
        let data = fixture(21, 150);
        for classifier in [Classifier::Glm, Classifier::cart(0.01)] {
            let run = propensity_run(&data, &data, &classifier).unwrap();
            assert_eq!(run.pmse(), 0.0, "{}", classifier.name());
            assert_eq!(specks(&run).unwrap(), 0.0);
            assert_eq!(run.c, 0.5);
        }
    }

    #[test]
    fn disjoint_scores_give_specks_one() {
        let run = PropensityRun {
            classifier: "glm",
            scores_original: vec![0.1, 0.2, 0.15],
            scores_synthetic: vec![0.8, 0.9],
            c: 0.4,
            k: Some(3),
            cp: None,
            unseen_levels: 0,
            notes: vec![],
        };
        assert_eq!(specks(&run).unwrap(), 1.0);
        let same = PropensityRun {
            scores_synthetic: run.scores_original.clone(),
            ..run
        };
        assert_eq!(specks(&same).unwrap(), 0.0);
    }

    #[test]
    fn glm_bootstrap_null_tracks_the_parametric_formula() {
        let data = fixture(33, 2000);
        let mut rng = SeededRng::new(33).stream(1);
        let boot = null_pmse_bootstrap(&data, &Classifier::Glm, 100, &mut rng).unwrap();
        // k from the stacked design: intercept + 2 dummies + 1 continuous.
        let parametric = null_pmse_parametric(4, 0.5, 2 * 2000).unwrap();
        assert!(
            (boot / parametric - 1.0).abs() < 0.15,
            "bootstrap {boot} vs parametric {parametric}"
        );
    }

    #[test]
    fn bootstrap_averaging_shrinks_variance() {
        let data = fixture(34, 60);
        let single: Vec<f64> = (0..40)
            .map(|s| {
                let mut rng = SeededRng::new(200 + s).stream(2);
                null_pmse_bootstrap(&data, &Classifier::Glm, 1, &mut rng).unwrap()
            })
            .collect();
        let averaged: Vec<f64> = (0..40)
            .map(|s| {
                let mut rng = SeededRng::new(400 + s).stream(2);
                null_pmse_bootstrap(&data, &Classifier::Glm, 100, &mut rng).unwrap()
            })
            .collect();
        let var = |xs: &[f64]| {
            let m = xs.iter().sum::<f64>() / xs.len() as f64;
            xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
        };
        assert!(
            var(&averaged) < var(&single) / 20.0,
            "var1={} var100={}",
            var(&single),
            var(&averaged)
        );
    }

    #[test]
    fn degenerate_input_is_rejected() {
        let one = fixture(35, 1);
        let mut rng = SeededRng::new(35).stream(3);
        let err = null_pmse_bootstrap(&one, &Classifier::Glm, 10, &mut rng).unwrap_err();
        assert!(err.to_string().contains("insufficient rows"), "{err}");
    }

    #[test]
    fn shifted_synthetic_is_detected() {
        let orig = fixture(36, 400);
        // Different categorical balance: clearly distinguishable.
        let mut rng = SeededRng::new(37).stream(0);
        let n = 400;
        let kind: Vec<u32> = (0..n).map(|_| if rng.random::<f64>() < 0.9 { 0 } else { 1 }).collect();
        let level: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 0.3).collect();
        let synth =
            Dataset::new(schema(), vec![Column::Cat(kind), Column::Cont(level)]).unwrap();
        let run = propensity_run(&orig, &synth, &Classifier::Glm).unwrap();
        let null = null_pmse_parametric(run.k.unwrap(), run.c, run.n_total()).unwrap();
        assert!(run.pmse() / null > 10.0);
        assert!(specks(&run).unwrap() > 0.3);
    }
}
