//! Privacy parameters and sequential/parallel composition bookkeeping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute slack for budget comparisons. Splitting a budget m ways and
/// re-summing the parts must land back on the total despite rounding.
const BUDGET_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrivacyParams {
    pub epsilon: f64,
    pub delta: f64,
}

impl PrivacyParams {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::invalid(format!("delta must lie in [0, 1], got {delta}")));
        }
        Ok(Self { epsilon, delta })
    }

    pub fn pure(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, 0.0)
    }
}

/// Per-replicate budget under equal division: (eps/m, delta/m).
pub fn split_budget(params: PrivacyParams, m: u32) -> Result<PrivacyParams> {
    if m == 0 {
        return Err(Error::invalid("cannot split a budget zero ways"));
    }
    Ok(PrivacyParams {
        epsilon: params.epsilon / m as f64,
        delta: params.delta / m as f64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensitivityBound {
    pub l1: Option<f64>,
    pub l2: Option<f64>,
}

impl SensitivityBound {
    pub fn l1(v: f64) -> Result<Self> {
        Self::check(v)?;
        Ok(Self { l1: Some(v), l2: None })
    }

    pub fn l2(v: f64) -> Result<Self> {
        Self::check(v)?;
        Ok(Self { l1: None, l2: Some(v) })
    }

    pub fn both(l1: f64, l2: f64) -> Result<Self> {
        Self::check(l1)?;
        Self::check(l2)?;
        Ok(Self { l1: Some(l1), l2: Some(l2) })
    }

    fn check(v: f64) -> Result<()> {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::invalid(format!("sensitivity must be finite and >= 0, got {v}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub label: String,
    pub cost: PrivacyParams,
}

/// Sequential-composition accountant: spends append to a ledger and may never
/// exceed the total in either coordinate. `&mut self` serializes mutation.
#[derive(Clone, Debug)]
pub struct BudgetAccountant {
    total: PrivacyParams,
    spent_eps: f64,
    spent_delta: f64,
    ledger: Vec<LedgerEntry>,
}

impl BudgetAccountant {
    pub fn new(total: PrivacyParams) -> Self {
        Self {
            total,
            spent_eps: 0.0,
            spent_delta: 0.0,
            ledger: Vec::new(),
        }
    }

    pub fn total(&self) -> PrivacyParams {
        self.total
    }

    pub fn spent(&self) -> PrivacyParams {
        PrivacyParams {
            epsilon: self.spent_eps,
            delta: self.spent_delta,
        }
    }

    pub fn remaining(&self) -> PrivacyParams {
        PrivacyParams {
            epsilon: (self.total.epsilon - self.spent_eps).max(0.0),
            delta: (self.total.delta - self.spent_delta).max(0.0),
        }
    }

    pub fn ledger(&self) -> &[LedgerEntry] {
        &self.ledger
    }

    /// Appends a spend, or rejects it whole if it would overdraw either
    /// coordinate. Never partially applies.
    pub fn spend(&mut self, label: &str, cost: PrivacyParams) -> Result<()> {
        if cost.epsilon < 0.0 || cost.delta < 0.0 {
            return Err(Error::invalid("spend cost must be nonnegative"));
        }
        let eps_ok = self.spent_eps + cost.epsilon <= self.total.epsilon + BUDGET_SLACK;
        let delta_ok = self.spent_delta + cost.delta <= self.total.delta + BUDGET_SLACK;
        if !(eps_ok && delta_ok) {
            let rem = self.remaining();
            return Err(Error::BudgetExhausted {
                req_eps: cost.epsilon,
                req_delta: cost.delta,
                rem_eps: rem.epsilon,
                rem_delta: rem.delta,
            });
        }
        self.spent_eps += cost.epsilon;
        self.spent_delta += cost.delta;
        self.ledger.push(LedgerEntry {
            label: label.to_string(),
            cost,
        });
        Ok(())
    }

    /// One charge for a family of queries over disjoint row partitions:
    /// parallel composition costs the max across branches, which is `cost`
    /// itself when every branch runs at the same level. The caller is
    /// responsible for the disjointness claim.
    pub fn parallel_spend(
        &mut self,
        label: &str,
        cost: PrivacyParams,
        partition_count: usize,
    ) -> Result<()> {
        if partition_count == 0 {
            return Err(Error::invalid("parallel scope needs at least one partition"));
        }
        let label = format!("{label} [parallel x{partition_count}]");
        self.spend(&label, cost)
    }
}
