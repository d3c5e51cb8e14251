//! Dense cross-tabulations over column subsets, and categorical sampling.

use rand::Rng;

use crate::data::BinnedView;
use crate::error::{Error, Result};
use crate::rng::NoiseRng;

/// Counts over the cross-product of a column tuple, row-major with the
/// first column slowest-varying. Counts are real: noise and projection
/// produce fractional values.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginalTable {
    columns: Vec<usize>,
    cards: Vec<u32>,
    counts: Vec<f64>,
    n_source: f64,
}

impl MarginalTable {
    pub fn new(columns: Vec<usize>, cards: Vec<u32>, counts: Vec<f64>) -> Result<Self> {
        if columns.is_empty() || columns.len() != cards.len() {
            return Err(Error::invalid("marginal needs a non-empty column tuple with matching cardinalities"));
        }
        if !columns.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("marginal columns must be strictly ascending"));
        }
        let cells: usize = cards.iter().map(|&c| c as usize).product();
        if counts.len() != cells {
            return Err(Error::invalid("marginal count vector does not match the cell grid"));
        }
        let n_source = sum_in_order(&counts);
        Ok(Self { columns, cards, counts, n_source })
    }

    pub fn columns(&self) -> &[usize] {
        &self.columns
    }

    pub fn cards(&self) -> &[u32] {
        &self.cards
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn counts_mut(&mut self) -> &mut [f64] {
        &mut self.counts
    }

    pub fn cells(&self) -> usize {
        self.counts.len()
    }

    /// Total count as built, before any perturbation.
    pub fn n_source(&self) -> f64 {
        self.n_source
    }

    /// Current grand total, summed in cell order.
    pub fn total(&self) -> f64 {
        sum_in_order(&self.counts)
    }

    pub fn index_of(&self, codes: &[u32]) -> usize {
        debug_assert_eq!(codes.len(), self.cards.len());
        let mut idx = 0usize;
        for (i, &code) in codes.iter().enumerate() {
            debug_assert!(code < self.cards[i]);
            idx = idx * self.cards[i] as usize + code as usize;
        }
        idx
    }

    pub fn decode(&self, idx: usize) -> Vec<u32> {
        decode_cell(&self.cards, idx)
    }

    /// Maps every cell to its bucket under projection onto `shared`
    /// (a subset of this table's columns, ascending). Returns the map and
    /// the bucket count; the empty subset projects to the grand total.
    pub fn bucket_map(&self, shared: &[usize]) -> (Vec<usize>, usize) {
        let pos: Vec<usize> = shared
            .iter()
            .map(|c| {
                self.columns
                    .iter()
                    .position(|x| x == c)
                    .expect("shared column must belong to the table")
            })
            .collect();
        let buckets: usize = pos.iter().map(|&p| self.cards[p] as usize).product();
        let mut map = vec![0usize; self.cells()];
        for (idx, slot) in map.iter_mut().enumerate() {
            let codes = self.decode(idx);
            let mut b = 0usize;
            for &p in &pos {
                b = b * self.cards[p] as usize + codes[p] as usize;
            }
            *slot = b;
        }
        (map, buckets)
    }

    /// Sub-margin over `shared`, summed in cell order.
    pub fn margin(&self, shared: &[usize]) -> Vec<f64> {
        let (map, buckets) = self.bucket_map(shared);
        let mut out = vec![0.0; buckets];
        for (idx, &b) in map.iter().enumerate() {
            out[b] += self.counts[idx];
        }
        out
    }
}

/// Inverse of the row-major cell index for the given cardinalities.
pub fn decode_cell(cards: &[u32], mut idx: usize) -> Vec<u32> {
    let mut codes = vec![0u32; cards.len()];
    for i in (0..cards.len()).rev() {
        let c = cards[i] as usize;
        codes[i] = (idx % c) as u32;
        idx /= c;
    }
    codes
}

/// Adding in ascending cell order keeps totals bit-identical across runs
/// regardless of how callers parallelize elsewhere.
fn sum_in_order(xs: &[f64]) -> f64 {
    let mut acc = 0.0;
    for &x in xs {
        acc += x;
    }
    acc
}

/// Exact cross-tabulation of the tuple's observed codes.
pub fn build_marginal(view: &BinnedView, columns: &[usize], max_cells: u64) -> Result<MarginalTable> {
    if columns.is_empty() {
        return Err(Error::invalid("marginal over an empty column tuple"));
    }
    if !columns.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::invalid("marginal columns must be strictly ascending"));
    }
    let cards: Vec<u32> = columns.iter().map(|&c| view.cardinality(c)).collect();
    let cells = cards.iter().fold(1u128, |acc, &c| acc.saturating_mul(c as u128));
    if cells > max_cells as u128 {
        return Err(Error::invalid(format!(
            "cell budget exceeded: {cells} cells over the {max_cells} cap"
        )));
    }
    let mut counts = vec![0.0; cells as usize];
    let cols: Vec<&[u32]> = columns.iter().map(|&c| view.col(c)).collect();
    for row in 0..view.n() {
        let mut idx = 0usize;
        for (t, col) in cols.iter().enumerate() {
            idx = idx * cards[t] as usize + col[row] as usize;
        }
        counts[idx] += 1.0;
    }
    MarginalTable::new(columns.to_vec(), cards, counts)
}

/// n draws from the distribution proportional to `weights`, by inverse CDF
/// over the running sum. Zero-weight cells are unreachable.
pub fn sample_group(weights: &[f64], n: usize, rng: &mut NoiseRng) -> Result<Vec<usize>> {
    if weights.is_empty() {
        return Err(Error::invalid("cannot sample from an empty weight vector"));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::invalid("sampling weights must be finite and nonnegative"));
    }
    let mut cum = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for &w in weights {
        acc += w;
        cum.push(acc);
    }
    let total = acc;
    if total <= 0.0 {
        return Err(Error::invalid("sampling weights are all zero"));
    }
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let t = rng.random::<f64>() * total;
        let mut idx = cum.partition_point(|&c| c <= t);
        if idx >= weights.len() {
            // t == total after rounding; land on the last reachable cell.
            idx = weights.iter().rposition(|&w| w > 0.0).unwrap();
        }
        out.push(idx);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{discretize, Column, Dataset};
    use crate::rng::SeededRng;
    use crate::schema::Schema;
    use crate::stats::chi_square_upper_tail;

    fn view_of(cards: &[usize], cols: Vec<Vec<u32>>) -> BinnedView {
        let text: String = cards
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let levels: Vec<String> = (0..k).map(|l| format!("l{l}")).collect();
                format!("c{i} | categorical | {}\n", levels.join(","))
            })
            .collect();
        let schema = Schema::from_codebook(&text).unwrap();
        let data = Dataset::new(schema, cols.into_iter().map(Column::Cat).collect()).unwrap();
        discretize(&data)
    }

    #[test]
    fn single_binary_column_counts() {
        let view = view_of(&[2], vec![vec![0, 1, 1]]);
        let t = build_marginal(&view, &[0], 1_000_000).unwrap();
        assert_eq!(t.counts(), &[1.0, 2.0]);
        assert_eq!(t.n_source(), 3.0);
    }

    #[test]
    fn empty_tuple_rejected() {
        let view = view_of(&[2], vec![vec![0, 1]]);
        assert!(build_marginal(&view, &[], 1_000_000).is_err());
    }

    #[test]
    fn two_by_two_matches_hand_enumeration() {
        // Rows: (0,0), (1,1), (1,0), (1,1).
        let view = view_of(&[2, 2], vec![vec![0, 1, 1, 1], vec![0, 1, 0, 1]]);
        let t = build_marginal(&view, &[0, 1], 1_000_000).unwrap();
        // Cells in row-major order: (0,0), (0,1), (1,0), (1,1).
        assert_eq!(t.counts(), &[1.0, 0.0, 1.0, 2.0]);
        assert_eq!(t.total(), 4.0);
    }

    #[test]
    fn cell_budget_enforced() {
        let view = view_of(&[10, 10], vec![vec![0; 4], vec![0; 4]]);
        assert!(build_marginal(&view, &[0, 1], 99).is_err());
        assert!(build_marginal(&view, &[0, 1], 100).is_ok());
    }

    #[test]
    fn margin_and_buckets() {
        let view = view_of(&[2, 3], vec![vec![0, 0, 1, 1, 1], vec![0, 2, 1, 1, 2]]);
        let t = build_marginal(&view, &[0, 1], 1_000_000).unwrap();
        assert_eq!(t.margin(&[0]), vec![2.0, 3.0]);
        assert_eq!(t.margin(&[1]), vec![1.0, 2.0, 2.0]);
        assert_eq!(t.margin(&[]), vec![5.0]);
        let (map, buckets) = t.bucket_map(&[1]);
        assert_eq!(buckets, 3);
        assert_eq!(map, vec![0, 1, 2, 0, 1, 2]);
    }

    #[test]
    fn decode_inverts_index() {
        let view = view_of(&[3, 2, 4], vec![vec![0], vec![0], vec![0]]);
        let t = build_marginal(&view, &[0, 1, 2], 1_000_000).unwrap();
        for idx in 0..t.cells() {
            assert_eq!(t.index_of(&t.decode(idx)), idx);
        }
    }

    #[test]
    fn degenerate_weight_hits_single_cell() {
        let mut rng = SeededRng::new(51).stream(0);
        let draws = sample_group(&[1.0, 0.0, 0.0], 1000, &mut rng).unwrap();
        assert!(draws.iter().all(|&i| i == 0));
    }

    #[test]
    fn symmetric_weights_split_evenly() {
        let mut rng = SeededRng::new(52).stream(0);
        let draws = sample_group(&[1.0, 1.0], 100_000, &mut rng).unwrap();
        let ones = draws.iter().filter(|&&i| i == 1).count() as f64;
        let frac = ones / 100_000.0;
        assert!((frac - 0.5).abs() < 0.01, "frac = {frac}");
    }

    #[test]
    fn draw_frequencies_pass_gof() {
        for (weights, seed) in [(vec![0.2, 0.3, 0.5], 53u64), (vec![30.0, 70.0], 54)] {
            let mut rng = SeededRng::new(seed).stream(0);
            let n = 100_000;
            let draws = sample_group(&weights, n, &mut rng).unwrap();
            let mut counts = vec![0u64; weights.len()];
            for i in draws {
                counts[i] += 1;
            }
            let total: f64 = weights.iter().sum();
            let stat: f64 = counts
                .iter()
                .zip(&weights)
                .map(|(&c, &w)| {
                    let e = w / total * n as f64;
                    (c as f64 - e).powi(2) / e
                })
                .sum();
            let p = chi_square_upper_tail(stat, (weights.len() - 1) as f64).unwrap();
            assert!(p > 0.001, "weights {weights:?}: stat={stat} p={p}");
        }
    }

    #[test]
    fn invalid_weights_rejected() {
        let mut rng = SeededRng::new(55).stream(0);
        assert!(sample_group(&[], 1, &mut rng).is_err());
        assert!(sample_group(&[0.0, 0.0], 1, &mut rng).is_err());
        assert!(sample_group(&[-1.0, 2.0], 1, &mut rng).is_err());
        assert!(sample_group(&[f64::NAN], 1, &mut rng).is_err());
    }
}
