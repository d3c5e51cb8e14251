//! Iterative proportional fitting of a group joint to target marginals.

use crate::error::{Error, Result};
use crate::marginal::MarginalTable;

pub const IPF_MAX_ITERS: u32 = 500;
pub const IPF_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct IpfFit {
    pub joint: MarginalTable,
    pub converged: bool,
    pub iterations: u32,
    pub max_err: f64,
}

/// Fits the maximum-entropy joint over `columns` matching every target
/// margin, starting from a uniform table at the targets' mean grand total.
/// Targets must be nonnegative tables over subsets of `columns`. Returns
/// the best iterate even when the L-infinity margin error never reaches
/// `tol`; the flag tells the caller to warn.
pub fn fit_joint(
    columns: &[usize],
    cards: &[u32],
    targets: &[MarginalTable],
    max_iters: u32,
    tol: f64,
) -> Result<IpfFit> {
    if targets.is_empty() {
        return Err(Error::invalid("ipf needs at least one target marginal"));
    }
    for t in targets {
        if !t.columns().iter().all(|c| columns.contains(c)) {
            return Err(Error::invalid("ipf target spans columns outside the group"));
        }
        if t.counts().iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::invalid("ipf targets must be finite and nonnegative"));
        }
    }

    let cells: usize = cards.iter().map(|&c| c as usize).product();
    let grand = targets.iter().map(|t| t.total()).sum::<f64>() / targets.len() as f64;
    let mut joint = MarginalTable::new(
        columns.to_vec(),
        cards.to_vec(),
        vec![grand / cells as f64; cells],
    )?;

    let plans: Vec<(Vec<usize>, usize, &MarginalTable)> = targets
        .iter()
        .map(|t| {
            let (map, buckets) = joint.bucket_map(t.columns());
            (map, buckets, t)
        })
        .collect();

    let mut max_err = f64::INFINITY;
    for iter in 0..max_iters {
        for (map, buckets, target) in &plans {
            let mut implied = vec![0.0; *buckets];
            for (i, &bk) in map.iter().enumerate() {
                implied[bk] += joint.counts()[i];
            }
            let factors: Vec<f64> = implied
                .iter()
                .zip(target.counts())
                .map(|(&got, &want)| if got > 0.0 { want / got } else { 1.0 })
                .collect();
            let counts = joint.counts_mut();
            for (i, &bk) in map.iter().enumerate() {
                counts[i] *= factors[bk];
            }
        }
        max_err = 0.0f64;
        for (map, buckets, target) in &plans {
            let mut implied = vec![0.0; *buckets];
            for (i, &bk) in map.iter().enumerate() {
                implied[bk] += joint.counts()[i];
            }
            for (got, want) in implied.iter().zip(target.counts()) {
                max_err = max_err.max((got - want).abs());
            }
        }
        if max_err < tol {
            return Ok(IpfFit { joint, converged: true, iterations: iter + 1, max_err });
        }
    }
    Ok(IpfFit { joint, converged: false, iterations: max_iters, max_err })
}
