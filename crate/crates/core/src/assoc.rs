//! Pairwise association scores and greedy variable grouping.

use std::collections::BTreeMap;

use crate::data::BinnedView;
use crate::error::{Error, Result};

pub const DEFAULT_ASSOCIATION_THRESHOLD: f64 = 0.3;
pub const DEFAULT_MAX_GROUP_SIZE: usize = 3;
pub const DEFAULT_MAX_CELLS: u64 = 1_000_000;

/// Symmetric matrix of Cramér's V scores with a unit diagonal, plus the
/// column cardinalities needed to budget joint-table sizes downstream.
#[derive(Clone, Debug)]
pub struct AssociationMatrix {
    q: usize,
    cardinalities: Vec<u64>,
    scores: Vec<f64>,
}

impl AssociationMatrix {
    pub fn from_parts(scores: Vec<f64>, cardinalities: Vec<u64>) -> Result<Self> {
        let q = cardinalities.len();
        if scores.len() != q * q {
            return Err(Error::invalid("score matrix shape does not match cardinalities"));
        }
        for i in 0..q {
            if scores[i * q + i] != 1.0 {
                return Err(Error::invalid("association matrix must have a unit diagonal"));
            }
            for j in 0..q {
                let v = scores[i * q + j];
                if !(0.0..=1.0).contains(&v) || v != scores[j * q + i] {
                    return Err(Error::invalid("association matrix must be symmetric with scores in [0, 1]"));
                }
            }
        }
        Ok(Self { q, cardinalities, scores })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.scores[i * self.q + j]
    }

    pub fn cardinality(&self, i: usize) -> u64 {
        self.cardinalities[i]
    }
}

/// Cramér's V over every column pair of a binned table. Observed categories
/// only: a level that never occurs does not contribute a degree of freedom,
/// so a constant column scores 0 against everything.
pub fn association_matrix(view: &BinnedView) -> Result<AssociationMatrix> {
    let n = view.n();
    if n < 2 {
        return Err(Error::invalid("association scores need at least 2 rows"));
    }
    let q = view.q();
    let mut scores = vec![0.0; q * q];
    for i in 0..q {
        scores[i * q + i] = 1.0;
        for j in (i + 1)..q {
            let v = cramers_v(view.col(i), view.col(j), n);
            scores[i * q + j] = v;
            scores[j * q + i] = v;
        }
    }
    let cardinalities = (0..q).map(|i| view.cardinality(i) as u64).collect();
    Ok(AssociationMatrix { q, cardinalities, scores })
}

fn cramers_v(a: &[u32], b: &[u32], n: usize) -> f64 {
    let mut cells: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    let mut row_tot: BTreeMap<u32, u64> = BTreeMap::new();
    let mut col_tot: BTreeMap<u32, u64> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *cells.entry((x, y)).or_insert(0) += 1;
        *row_tot.entry(x).or_insert(0) += 1;
        *col_tot.entry(y).or_insert(0) += 1;
    }
    let r = row_tot.len();
    let c = col_tot.len();
    let k = r.min(c);
    if k == 1 {
        return 0.0;
    }
    // chi^2 = n * (sum o^2 / (rowtot * coltot) - 1), observed cells only.
    let nf = n as f64;
    let mut s = 0.0;
    for (&(x, y), &o) in &cells {
        s += (o as f64) * (o as f64) / (row_tot[&x] as f64 * col_tot[&y] as f64);
    }
    let chi2 = nf * (s - 1.0);
    (chi2 / (nf * (k - 1) as f64)).sqrt().clamp(0.0, 1.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupingPlan {
    pub groups: Vec<Vec<usize>>,
    pub group_cells: Vec<u64>,
}

/// Greedy agglomeration: repeatedly merge the two groups with the highest
/// mean cross-group score, skipping merges that would cross the size or
/// cell-count caps, until no pair reaches the threshold. Ties go to the
/// lowest column indices.
pub fn group_variables(
    assoc: &AssociationMatrix,
    threshold: f64,
    max_group_size: usize,
    max_cells: u64,
) -> Result<GroupingPlan> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::invalid(format!("threshold must lie in [0, 1], got {threshold}")));
    }
    if max_group_size == 0 || max_cells == 0 {
        return Err(Error::invalid("group size and cell caps must be positive"));
    }
    // Groups stay sorted by leading column, so scanning pairs in order and
    // replacing only on strictly better means resolves ties toward the
    // lowest column indices.
    let mut groups: Vec<Vec<usize>> = (0..assoc.q()).map(|i| vec![i]).collect();
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..groups.len() {
            for b in (a + 1)..groups.len() {
                if groups[a].len() + groups[b].len() > max_group_size {
                    continue;
                }
                if cells_of(assoc, &groups[a]).saturating_mul(cells_of(assoc, &groups[b]))
                    > max_cells as u128
                {
                    continue;
                }
                let mut sum = 0.0;
                for &i in &groups[a] {
                    for &j in &groups[b] {
                        sum += assoc.get(i, j);
                    }
                }
                let mean = sum / (groups[a].len() * groups[b].len()) as f64;
                if mean >= threshold && best.map_or(true, |(m, _, _)| mean > m) {
                    best = Some((mean, a, b));
                }
            }
        }
        match best {
            Some((_, a, b)) => {
                let merged = groups.remove(b);
                groups[a].extend(merged);
                groups[a].sort_unstable();
                groups.sort_by_key(|g| g[0]);
            }
            None => break,
        }
    }
    let group_cells = groups
        .iter()
        .map(|g| cells_of(assoc, g).min(u64::MAX as u128) as u64)
        .collect();
    Ok(GroupingPlan { groups, group_cells })
}

fn cells_of(assoc: &AssociationMatrix, group: &[usize]) -> u128 {
    group
        .iter()
        .fold(1u128, |acc, &i| acc.saturating_mul(assoc.cardinality(i) as u128))
}
