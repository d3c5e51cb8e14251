//! Reconciles noisy marginal tables that disagree on shared sub-margins.

use crate::marginal::MarginalTable;

const MARGIN_TOL: f64 = 1e-9;
const MAX_SWEEPS: u32 = 100;

struct PairPlan {
    a: usize,
    b: usize,
    map_a: Vec<usize>,
    map_b: Vec<usize>,
    buckets: usize,
    // Cells contributing to one bucket on each side; the margin variances
    // are proportional to these, which fixes the averaging weights.
    p: f64,
    q: f64,
}

/// Iterated projection onto pairwise margin agreement. Each pass replaces
/// both tables' shared sub-margins with their variance-weighted average
/// (weights 1/p and 1/q for homoscedastic cell noise), spreading the change
/// uniformly over contributing cells. That update is the Euclidean
/// projection onto the pair's agreement subspace, so cycling converges to
/// the least-squares consensus. Disjoint tables reconcile through their
/// grand totals. Negatives are clipped afterwards and sweeps resume until
/// the clip is a no-op; finally every table is rescaled to the consensus
/// total.
pub fn enforce_consistency(tables: &[MarginalTable]) -> Vec<MarginalTable> {
    if tables.len() <= 1 {
        let mut out = tables.to_vec();
        for t in &mut out {
            for c in t.counts_mut() {
                *c = c.max(0.0);
            }
        }
        return out;
    }

    let mut pairs = Vec::new();
    for a in 0..tables.len() {
        for b in (a + 1)..tables.len() {
            let shared: Vec<usize> = tables[a]
                .columns()
                .iter()
                .filter(|c| tables[b].columns().contains(c))
                .cloned()
                .collect();
            let (map_a, buckets) = tables[a].bucket_map(&shared);
            let (map_b, buckets_b) = tables[b].bucket_map(&shared);
            debug_assert_eq!(buckets, buckets_b);
            let p = tables[a].cells() as f64 / buckets as f64;
            let q = tables[b].cells() as f64 / buckets as f64;
            pairs.push(PairPlan { a, b, map_a, map_b, buckets, p, q });
        }
    }

    let mut counts: Vec<Vec<f64>> = tables.iter().map(|t| t.counts().to_vec()).collect();
    for _round in 0..MAX_SWEEPS {
        for _sweep in 0..MAX_SWEEPS {
            let mut worst: f64 = 0.0;
            for pair in &pairs {
                let mut ma = vec![0.0; pair.buckets];
                for (i, &bk) in pair.map_a.iter().enumerate() {
                    ma[bk] += counts[pair.a][i];
                }
                let mut mb = vec![0.0; pair.buckets];
                for (i, &bk) in pair.map_b.iter().enumerate() {
                    mb[bk] += counts[pair.b][i];
                }
                let mut shift_a = vec![0.0; pair.buckets];
                let mut shift_b = vec![0.0; pair.buckets];
                for bk in 0..pair.buckets {
                    let diff = mb[bk] - ma[bk];
                    worst = worst.max(diff.abs());
                    // Target (q*ma + p*mb)/(p+q), spread evenly per cell.
                    shift_a[bk] = diff / (pair.p + pair.q);
                    shift_b[bk] = -diff / (pair.p + pair.q);
                }
                for (i, &bk) in pair.map_a.iter().enumerate() {
                    counts[pair.a][i] += shift_a[bk];
                }
                for (i, &bk) in pair.map_b.iter().enumerate() {
                    counts[pair.b][i] += shift_b[bk];
                }
            }
            if worst < MARGIN_TOL {
                break;
            }
        }
        let mut clipped = false;
        for table in &mut counts {
            for c in table.iter_mut() {
                if *c < 0.0 {
                    *c = 0.0;
                    clipped = true;
                }
            }
        }
        if !clipped {
            break;
        }
    }

    let totals: Vec<f64> = counts.iter().map(|c| c.iter().sum()).collect();
    let consensus = totals.iter().sum::<f64>() / totals.len() as f64;
    for (table, &total) in counts.iter_mut().zip(&totals) {
        if total > 0.0 {
            let f = consensus / total;
            for c in table.iter_mut() {
                *c *= f;
            }
        }
    }

    tables
        .iter()
        .zip(counts)
        .map(|(t, c)| MarginalTable::new(t.columns().to_vec(), t.cards().to_vec(), c).unwrap())
        .collect()
}
