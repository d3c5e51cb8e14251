//! Utility measures comparing a synthetic dataset against its original:
//! column-wise distribution tests, propensity-score discrimination, fitted
//! regression agreement, and three bespoke challenge-style scores.

pub mod nist;
pub mod propensity;
pub mod regression;
pub mod univariate;

use serde::{Deserialize, Serialize};

use crate::budget::PrivacyParams;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    SmallerBetter,
    LargerBetter,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricCategory {
    Marginal,
    Joint,
    Correlation,
}

/// One metric aggregated over synthesis replicates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricResult {
    pub name: String,
    pub category: MetricCategory,
    pub value: f64,
    pub orientation: Orientation,
    pub per_replicate: Vec<f64>,
    pub privacy: PrivacyParams,
}

impl MetricResult {
    /// `value` is always the replicate mean; constructing it any other way
    /// would let the summary drift from the evidence.
    pub fn from_replicates(
        name: impl Into<String>,
        category: MetricCategory,
        orientation: Orientation,
        per_replicate: Vec<f64>,
        privacy: PrivacyParams,
    ) -> Result<Self> {
        if per_replicate.is_empty() {
            return Err(Error::invalid("metric needs at least one replicate value"));
        }
        if per_replicate.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("metric replicate values must be finite"));
        }
        let value = crate::stats::mean(&per_replicate);
        Ok(MetricResult {
            name: name.into(),
            category,
            value,
            orientation,
            per_replicate,
            privacy,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_is_the_replicate_mean() {
        let p = PrivacyParams::pure(1.0).unwrap();
        let m = MetricResult::from_replicates(
            "x",
            MetricCategory::Joint,
            Orientation::SmallerBetter,
            vec![1.0, 2.0, 6.0],
            p,
        )
        .unwrap();
        assert_eq!(m.value, 3.0);
        assert!(MetricResult::from_replicates(
            "x",
            MetricCategory::Joint,
            Orientation::SmallerBetter,
            vec![],
            p
        )
        .is_err());
        assert!(MetricResult::from_replicates(
            "x",
            MetricCategory::Joint,
            Orientation::SmallerBetter,
            vec![f64::NAN],
            p
        )
        .is_err());
    }
}
