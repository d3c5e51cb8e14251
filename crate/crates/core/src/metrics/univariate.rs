//! Column-by-column distribution comparisons: a two-sample chi-square
//! homogeneity test for categorical columns, a two-sample KS test for
//! continuous ones, and their per-type p-value means.

use crate::data::{Column, Dataset};
use crate::error::{Error, Result};
use crate::stats::{chi_square_upper_tail, kolmogorov_q, ks_statistic};

/// P-value of the 2xL homogeneity test on level counts. Levels unused by
/// both samples are dropped first; with fewer than two surviving levels
/// there is no structure to test and the p-value is defined as 1, flagged
/// through the second return.
pub fn marginal_chisq_pvalue(orig: &[u32], synth: &[u32], card: u32) -> Result<(f64, bool)> {
    if orig.is_empty() || synth.is_empty() {
        return Err(Error::invalid("chi-square test needs two non-empty columns"));
    }
    if orig.iter().chain(synth).any(|&c| c >= card) {
        return Err(Error::invalid("level code outside the shared domain"));
    }
    let mut count_o = vec![0u64; card as usize];
    let mut count_s = vec![0u64; card as usize];
    for &c in orig {
        count_o[c as usize] += 1;
    }
    for &c in synth {
        count_s[c as usize] += 1;
    }
    let surviving: Vec<usize> =
        (0..card as usize).filter(|&l| count_o[l] + count_s[l] > 0).collect();
    if surviving.len() < 2 {
        return Ok((1.0, true));
    }
    let n_o = orig.len() as f64;
    let n_s = synth.len() as f64;
    let total = n_o + n_s;
    let mut stat = 0.0;
    for &l in &surviving {
        let pooled = (count_o[l] + count_s[l]) as f64;
        let e_o = pooled * n_o / total;
        let e_s = pooled * n_s / total;
        stat += (count_o[l] as f64 - e_o).powi(2) / e_o;
        stat += (count_s[l] as f64 - e_s).powi(2) / e_s;
    }
    let df = (surviving.len() - 1) as f64;
    Ok((chi_square_upper_tail(stat, df)?, false))
}

/// Two-sample KS test with the asymptotic Kolmogorov tail at effective size
/// ne = n·n*/(n+n*).
pub fn marginal_ks_pvalue(orig: &[f64], synth: &[f64]) -> Result<f64> {
    let d = ks_statistic(orig, synth)?;
    let ne = orig.len() as f64 * synth.len() as f64 / (orig.len() + synth.len()) as f64;
    Ok(kolmogorov_q(ne.sqrt() * d))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarginalMeans {
    /// Mean chi-square p-value over categorical columns; absent without them.
    pub chisq_mean: Option<f64>,
    /// Mean KS p-value over continuous columns; absent without them.
    pub ks_mean: Option<f64>,
    /// Categorical columns whose test degenerated to a single used level.
    pub degenerate_columns: usize,
}

pub fn marginal_means(orig: &Dataset, synth: &Dataset) -> Result<MarginalMeans> {
    if **orig.schema() != **synth.schema() {
        return Err(Error::invalid("marginal comparison needs a shared schema"));
    }
    let mut chisq = Vec::new();
    let mut ks = Vec::new();
    let mut degenerate = 0usize;
    for i in 0..orig.q() {
        match (orig.column(i), synth.column(i)) {
            (Column::Cat(a), Column::Cat(b)) => {
                let (p, flagged) = marginal_chisq_pvalue(a, b, orig.schema().cardinality(i))?;
                if flagged {
                    degenerate += 1;
                }
                chisq.push(p);
            }
            (Column::Cont(a), Column::Cont(b)) => ks.push(marginal_ks_pvalue(a, b)?),
            _ => unreachable!("shared schema implies matching storage"),
        }
    }
    let mean = |xs: &[f64]| {
        if xs.is_empty() {
            None
        } else {
            Some(crate::stats::mean(xs))
        }
    };
    Ok(MarginalMeans {
        chisq_mean: mean(&chisq),
        ks_mean: mean(&ks),
        degenerate_columns: degenerate,
    })
}
