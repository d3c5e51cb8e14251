//! Binary classification trees in the rpart style: Gini impurity, a
//! complexity-parameter gate relative to root impurity, and categorical
//! splits searched over target-mean-ordered level prefixes.
//!
//! All split statistics come from integer counts, so fitting is invariant
//! to row order.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::data::{Column, Dataset};
use crate::error::{Error, Result};

pub const CART_MIN_LEAF: usize = 20;
pub const CART_CV_FOLDS: usize = 10;
pub const CART_CP_GRID: [f64; 6] = [0.0001, 0.0005, 0.001, 0.005, 0.01, 0.05];

#[derive(Clone, Debug, PartialEq)]
pub enum SplitRule {
    /// Go left when x <= threshold.
    Threshold(f64),
    /// Go left when the level's slot is set; indexed by level code.
    Levels(Vec<bool>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Leaf {
        prob: f64,
        n: usize,
    },
    Split {
        column: usize,
        rule: SplitRule,
        /// Level codes present in this node's training rows; anything else
        /// is routed to the majority branch at prediction time.
        seen: Vec<bool>,
        majority_left: bool,
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CartTree {
    nodes: Vec<Node>,
    pub cp: f64,
    pub min_leaf: usize,
    pub root_impurity: f64,
    n_train: usize,
}

#[derive(Clone, Debug)]
pub struct CartPrediction {
    pub scores: Vec<f64>,
    /// Rows that hit a categorical level absent from the training node.
    pub unseen_levels: u64,
}

impl CartTree {
    pub fn node(&self, idx: usize) -> &Node {
        &self.nodes[idx]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn predict(&self, data: &Dataset) -> CartPrediction {
        let mut scores = Vec::with_capacity(data.n());
        let mut unseen = 0u64;
        for i in 0..data.n() {
            let mut at = 0usize;
            loop {
                match &self.nodes[at] {
                    Node::Leaf { prob, .. } => {
                        scores.push(*prob);
                        break;
                    }
                    Node::Split { column, rule, seen, majority_left, left, right } => {
                        let go_left = match (rule, data.column(*column)) {
                            (SplitRule::Threshold(t), Column::Cont(v)) => v[i] <= *t,
                            (SplitRule::Levels(mask), Column::Cat(codes)) => {
                                let code = codes[i] as usize;
                                if code >= seen.len() || !seen[code] {
                                    unseen += 1;
                                    *majority_left
                                } else {
                                    mask[code]
                                }
                            }
                            _ => unreachable!("split rule kind matches the column kind"),
                        };
                        at = if go_left { *left } else { *right };
                    }
                }
            }
        }
        CartPrediction { scores, unseen_levels: unseen }
    }
}

/// Half the raw Gini risk of a node, n * G(n, ones) / 2 = ones*(n-ones)/n.
fn half_risk(n: usize, ones: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    ones as f64 * (n - ones) as f64 / n as f64
}

struct Candidate {
    column: usize,
    rule: SplitRule,
    /// Raw impurity decrease n*G - nl*Gl - nr*Gr, before the 1/n_train scale.
    decrease: f64,
    left_rows: Vec<usize>,
    right_rows: Vec<usize>,
}

struct Builder<'a> {
    data: &'a Dataset,
    predictors: &'a [usize],
    y: &'a [f64],
    min_leaf: usize,
    /// Absolute decrease a split must reach: cp * root_impurity * n_train.
    gate: f64,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn ones(&self, rows: &[usize]) -> usize {
        rows.iter().filter(|&&i| self.y[i] == 1.0).count()
    }

    fn grow(&mut self, rows: Vec<usize>) -> usize {
        let n = rows.len();
        let ones = self.ones(&rows);
        let here = self.nodes.len();
        self.nodes.push(Node::Leaf { prob: ones as f64 / n as f64, n });
        if ones == 0 || ones == n || n < 2 * self.min_leaf {
            return here;
        }
        let mut best: Option<Candidate> = None;
        for &col in self.predictors {
            let cand = match self.data.column(col) {
                Column::Cont(values) => self.best_threshold(col, values, &rows, n, ones),
                Column::Cat(codes) => self.best_level_split(col, codes, &rows, n, ones),
            };
            if let Some(c) = cand {
                if c.decrease > 0.0
                    && c.decrease + 1e-12 * c.decrease.abs() >= self.gate
                    && best.as_ref().is_none_or(|b| c.decrease > b.decrease)
                {
                    best = Some(c);
                }
            }
        }
        let Some(win) = best else { return here };
        let seen = match self.data.column(win.column) {
            Column::Cat(codes) => {
                let card = self.data.schema().cardinality(win.column) as usize;
                let mut seen = vec![false; card];
                for &i in &rows {
                    seen[codes[i] as usize] = true;
                }
                seen
            }
            Column::Cont(_) => Vec::new(),
        };
        let majority_left = win.left_rows.len() >= win.right_rows.len();
        let left = self.grow(win.left_rows);
        let right = self.grow(win.right_rows);
        self.nodes[here] = Node::Split {
            column: win.column,
            rule: win.rule,
            seen,
            majority_left,
            left,
            right,
        };
        here
    }

    fn best_threshold(
        &self,
        column: usize,
        values: &[f64],
        rows: &[usize],
        n: usize,
        ones: usize,
    ) -> Option<Candidate> {
        // Aggregate counts per distinct value; equal values can never be
        // separated, so only the (value -> counts) map matters.
        let mut pairs: Vec<(f64, usize)> = rows.iter().map(|&i| (values[i], i)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut distinct: Vec<(f64, usize, usize)> = Vec::new(); // value, count, ones
        for &(v, i) in &pairs {
            let one = (self.y[i] == 1.0) as usize;
            match distinct.last_mut() {
                Some(last) if last.0 == v => {
                    last.1 += 1;
                    last.2 += one;
                }
                _ => distinct.push((v, 1, one)),
            }
        }
        let mut best: Option<(f64, f64, usize)> = None; // decrease, threshold, left count
        let (mut ln, mut lones) = (0usize, 0usize);
        for w in 0..distinct.len().saturating_sub(1) {
            ln += distinct[w].1;
            lones += distinct[w].2;
            if ln < self.min_leaf || n - ln < self.min_leaf {
                continue;
            }
            let dec =
                2.0 * (half_risk(n, ones) - half_risk(ln, lones) - half_risk(n - ln, ones - lones));
            if best.is_none_or(|b| dec > b.0) {
                let threshold = (distinct[w].0 + distinct[w + 1].0) / 2.0;
                best = Some((dec, threshold, ln));
            }
        }
        best.map(|(decrease, threshold, _)| {
            let (mut left_rows, mut right_rows) = (Vec::new(), Vec::new());
            for &i in rows {
                if values[i] <= threshold {
                    left_rows.push(i);
                } else {
                    right_rows.push(i);
                }
            }
            Candidate { column, rule: SplitRule::Threshold(threshold), decrease, left_rows, right_rows }
        })
    }

    fn best_level_split(
        &self,
        column: usize,
        codes: &[u32],
        rows: &[usize],
        n: usize,
        ones: usize,
    ) -> Option<Candidate> {
        let card = self.data.schema().cardinality(column) as usize;
        let mut count = vec![0usize; card];
        let mut one = vec![0usize; card];
        for &i in rows {
            let c = codes[i] as usize;
            count[c] += 1;
            one[c] += (self.y[i] == 1.0) as usize;
        }
        let mut observed: Vec<usize> = (0..card).filter(|&c| count[c] > 0).collect();
        if observed.len() < 2 {
            return None;
        }
        // Order levels by target mean; the best two-subset split of a binary
        // target is a prefix of this order. Means compared exactly by
        // cross-multiplication, ties by level code.
        observed.sort_by(|&a, &b| {
            let lhs = one[a] as u128 * count[b] as u128;
            let rhs = one[b] as u128 * count[a] as u128;
            lhs.cmp(&rhs).then(a.cmp(&b))
        });
        let mut best: Option<(f64, usize)> = None; // decrease, prefix length
        let (mut ln, mut lones) = (0usize, 0usize);
        for w in 0..observed.len() - 1 {
            ln += count[observed[w]];
            lones += one[observed[w]];
            if ln < self.min_leaf || n - ln < self.min_leaf {
                continue;
            }
            let dec =
                2.0 * (half_risk(n, ones) - half_risk(ln, lones) - half_risk(n - ln, ones - lones));
            if best.is_none_or(|b| dec > b.0) {
                best = Some((dec, w + 1));
            }
        }
        best.map(|(decrease, prefix)| {
            let mut mask = vec![false; card];
            for &lvl in &observed[..prefix] {
                mask[lvl] = true;
            }
            let (mut left_rows, mut right_rows) = (Vec::new(), Vec::new());
            for &i in rows {
                if mask[codes[i] as usize] {
                    left_rows.push(i);
                } else {
                    right_rows.push(i);
                }
            }
            Candidate { column, rule: SplitRule::Levels(mask), decrease, left_rows, right_rows }
        })
    }
}

pub fn fit_cart(
    data: &Dataset,
    predictors: &[usize],
    y: &[f64],
    cp: f64,
    min_leaf: usize,
) -> Result<CartTree> {
    let n = data.n();
    if n == 0 {
        return Err(Error::invalid("cart needs at least one row"));
    }
    if y.len() != n {
        return Err(Error::invalid("response length does not match the data"));
    }
    if y.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::invalid("cart response must be 0/1"));
    }
    if !(cp.is_finite() && cp >= 0.0) {
        return Err(Error::invalid("cp must be finite and nonnegative"));
    }
    if min_leaf == 0 {
        return Err(Error::invalid("min_leaf must be positive"));
    }
    for &c in predictors {
        if c >= data.q() {
            return Err(Error::invalid("predictor index out of range"));
        }
    }
    let ones = y.iter().filter(|&&v| v == 1.0).count();
    let root_impurity = 2.0 * half_risk(n, ones) / n as f64;
    let mut builder = Builder {
        data,
        predictors,
        y,
        min_leaf,
        gate: cp * root_impurity * n as f64,
        nodes: Vec::new(),
    };
    builder.grow((0..n).collect());
    Ok(CartTree { nodes: builder.nodes, cp, min_leaf, root_impurity, n_train: n })
}

/// 10-fold cross-validated Brier score over a cp grid; ties prefer the
/// larger (simpler) cp.
pub fn cv_select_cp<R: Rng>(
    data: &Dataset,
    predictors: &[usize],
    y: &[f64],
    grid: &[f64],
    folds: usize,
    min_leaf: usize,
    rng: &mut R,
) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::invalid("cp grid must be non-empty"));
    }
    if grid.len() == 1 {
        return Ok(grid[0]);
    }
    let n = data.n();
    if folds < 2 || n < folds {
        return Err(Error::invalid("need at least two folds and one row per fold"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);

    let mut pooled = vec![0.0f64; sorted.len()];
    for f in 0..folds {
        let lo = f * n / folds;
        let hi = (f + 1) * n / folds;
        let test: Vec<usize> = order[lo..hi].to_vec();
        let train: Vec<usize> =
            order[..lo].iter().chain(&order[hi..]).copied().collect();
        let train_data = data.take_rows(&train);
        let train_y: Vec<f64> = train.iter().map(|&i| y[i]).collect();
        let test_data = data.take_rows(&test);
        for (g, &cp) in sorted.iter().enumerate() {
            let tree = fit_cart(&train_data, predictors, &train_y, cp, min_leaf)?;
            let pred = tree.predict(&test_data);
            for (k, &i) in test.iter().enumerate() {
                pooled[g] += (pred.scores[k] - y[i]).powi(2);
            }
        }
    }
    let mut best = 0usize;
    for g in 1..sorted.len() {
        if pooled[g] <= pooled[best] {
            best = g;
        }
    }
    Ok(sorted[best])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use crate::schema::Schema;
    use approx::assert_relative_eq;
    use std::collections::BTreeSet;
    use std::sync::Arc;

    fn mixed_schema() -> Arc<Schema> {
        Schema::from_codebook(
            "color | categorical | red,green,blue,gray\nsize | continuous | 0 | 10 | 5\n",
        )
        .unwrap()
    }

    fn mixed_fixture(seed: u64, n: usize) -> (Dataset, Vec<f64>) {
        let mut rng = SeededRng::new(seed).stream(7);
        let mut colors = Vec::with_capacity(n);
        let mut sizes = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for _ in 0..n {
            let c: u32 = rng.random_range(0..4);
            let s: f64 = rng.random_range(0.0..10.0);
            let pr = 0.15 + 0.5 * ((c == 2) as u8 as f64) + 0.03 * s;
            y.push(if rng.random::<f64>() < pr.min(0.95) { 1.0 } else { 0.0 });
            colors.push(c);
            sizes.push(s);
        }
        let data =
            Dataset::new(mixed_schema(), vec![Column::Cat(colors), Column::Cont(sizes)]).unwrap();
        (data, y)
    }

    #[test]
    fn separable_threshold_gives_pure_leaves() {
        let n = 40;
        let sizes: Vec<f64> = (0..n).map(|i| i as f64 / 4.0).collect();
        let y: Vec<f64> = (0..n).map(|i| if i < 20 { 0.0 } else { 1.0 }).collect();
        let data = Dataset::new(
            mixed_schema(),
            vec![Column::Cat(vec![0; n]), Column::Cont(sizes)],
        )
        .unwrap();
        let tree = fit_cart(&data, &[0, 1], &y, 0.01, 5).unwrap();
        assert_eq!(tree.node_count(), 3);
        let Node::Split { column, rule, left, right, .. } = tree.node(0) else {
            panic!("root should split");
        };
        assert_eq!(*column, 1);
        assert_eq!(rule, &SplitRule::Threshold((19.0 / 4.0 + 20.0 / 4.0) / 2.0));
        let (Node::Leaf { prob: pl, n: nl }, Node::Leaf { prob: pr, n: nr }) =
            (tree.node(*left), tree.node(*right))
        else {
            panic!("children should be leaves");
        };
        assert_eq!((*pl, *nl, *pr, *nr), (0.0, 20, 1.0, 20));
    }

    #[test]
    fn huge_cp_keeps_root_only() {
        let (data, y) = mixed_fixture(11, 200);
        let tree = fit_cart(&data, &[0, 1], &y, 1.0, 5).unwrap();
        assert_eq!(tree.node_count(), 1);
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        let Node::Leaf { prob, n } = tree.node(0) else { panic!() };
        assert_relative_eq!(*prob, mean);
        assert_eq!(*n, 200);
    }

    // Exhaustive search over every threshold and every level bipartition,
    // independent of the prefix-scan shortcut in the implementation.
    fn oracle_best(
        data: &Dataset,
        y: &[f64],
        rows: &[usize],
        min_leaf: usize,
    ) -> Option<(f64, BTreeSet<usize>)> {
        let n = rows.len();
        let ones = rows.iter().filter(|&&i| y[i] == 1.0).count();
        let node_risk = 2.0 * half_risk(n, ones);
        let mut best: Option<(f64, BTreeSet<usize>)> = None;
        let mut consider = |left: BTreeSet<usize>| {
            let ln = left.len();
            if ln < min_leaf || n - ln < min_leaf {
                return;
            }
            let lones = left.iter().filter(|&&i| y[i] == 1.0).count();
            let dec = node_risk
                - 2.0 * half_risk(ln, lones)
                - 2.0 * half_risk(n - ln, ones - lones);
            if best.as_ref().is_none_or(|b| dec > b.0 + 1e-15) {
                best = Some((dec, left));
            }
        };
        for col in 0..data.q() {
            match data.column(col) {
                Column::Cont(values) => {
                    let mut vals: Vec<f64> = rows.iter().map(|&i| values[i]).collect();
                    vals.sort_by(f64::total_cmp);
                    vals.dedup();
                    for w in 0..vals.len().saturating_sub(1) {
                        let t = (vals[w] + vals[w + 1]) / 2.0;
                        consider(rows.iter().copied().filter(|&i| values[i] <= t).collect());
                    }
                }
                Column::Cat(codes) => {
                    let levels: BTreeSet<u32> = rows.iter().map(|&i| codes[i]).collect();
                    let levels: Vec<u32> = levels.into_iter().collect();
                    let m = levels.len();
                    if m < 2 {
                        continue;
                    }
                    // All proper subsets containing the first level: each
                    // unordered bipartition exactly once.
                    for bits in 0..(1u32 << (m - 1)) {
                        let subset: BTreeSet<u32> = (0..m)
                            .filter(|&k| k == 0 || bits & (1 << (k - 1)) != 0)
                            .map(|k| levels[k])
                            .collect();
                        if subset.len() == m {
                            continue;
                        }
                        consider(
                            rows.iter().copied().filter(|&i| subset.contains(&codes[i])).collect(),
                        );
                    }
                }
            }
        }
        best
    }

    fn walk_and_check(
        tree: &CartTree,
        data: &Dataset,
        y: &[f64],
        at: usize,
        rows: Vec<usize>,
        min_leaf: usize,
        checked: &mut usize,
    ) {
        match tree.node(at) {
            Node::Leaf { prob, n } => {
                assert_eq!(*n, rows.len());
                let ones = rows.iter().filter(|&&i| y[i] == 1.0).count();
                assert_relative_eq!(*prob, ones as f64 / rows.len() as f64);
            }
            Node::Split { column, rule, left, right, .. } => {
                *checked += 1;
                let (mut lrows, mut rrows) = (Vec::new(), Vec::new());
                for &i in &rows {
                    let go_left = match (rule, data.column(*column)) {
                        (SplitRule::Threshold(t), Column::Cont(v)) => v[i] <= *t,
                        (SplitRule::Levels(mask), Column::Cat(c)) => mask[c[i] as usize],
                        _ => panic!("rule/column mismatch"),
                    };
                    if go_left {
                        lrows.push(i);
                    } else {
                        rrows.push(i);
                    }
                }
                let (dec, oracle_left) = oracle_best(data, y, &rows, min_leaf).unwrap();
                let fitted_left: BTreeSet<usize> = lrows.iter().copied().collect();
                let fitted_right: BTreeSet<usize> = rrows.iter().copied().collect();
                assert!(
                    oracle_left == fitted_left || oracle_left == fitted_right,
                    "node {at}: fitted partition differs from the exhaustive best"
                );
                let ones = rows.iter().filter(|&&i| y[i] == 1.0).count();
                let lones = lrows.iter().filter(|&&i| y[i] == 1.0).count();
                let fitted_dec = 2.0
                    * (half_risk(rows.len(), ones)
                        - half_risk(lrows.len(), lones)
                        - half_risk(rrows.len(), ones - lones));
                assert_relative_eq!(fitted_dec, dec, max_relative = 1e-12);
                // The advertised gate must hold on every kept split.
                assert!(fitted_dec >= tree.cp * tree.root_impurity * y.len() as f64 * (1.0 - 1e-12));
                walk_and_check(tree, data, y, *left, lrows, min_leaf, checked);
                walk_and_check(tree, data, y, *right, rrows, min_leaf, checked);
            }
        }
    }

    #[test]
    fn every_node_matches_exhaustive_search() {
        let (data, y) = mixed_fixture(29, 100);
        let tree = fit_cart(&data, &[0, 1], &y, 0.005, 7).unwrap();
        assert!(tree.node_count() > 1, "fixture should admit at least one split");
        let mut checked = 0;
        walk_and_check(&tree, &data, &y, 0, (0..100).collect(), 7, &mut checked);
        assert!(checked >= 2, "want a multi-level tree, got {checked} splits");
    }

    #[test]
    fn row_order_does_not_change_the_tree() {
        let (data, y) = mixed_fixture(43, 150);
        let tree = fit_cart(&data, &[0, 1], &y, 0.001, 10).unwrap();
        let mut perm: Vec<usize> = (0..150).collect();
        let mut rng = SeededRng::new(99).stream(1);
        perm.shuffle(&mut rng);
        let shuffled = data.take_rows(&perm);
        let shuffled_y: Vec<f64> = perm.iter().map(|&i| y[i]).collect();
        let tree2 = fit_cart(&shuffled, &[0, 1], &shuffled_y, 0.001, 10).unwrap();
        assert_eq!(tree, tree2);
        let (eval, _) = mixed_fixture(44, 60);
        assert_eq!(tree.predict(&eval).scores, tree2.predict(&eval).scores);
    }

    #[test]
    fn unseen_level_goes_to_majority_branch() {
        // Train without gray; 12 green rows (left branch will be the
        // minority), so gray must follow the majority side.
        let mut colors = vec![2u32; 12];
        colors.extend(vec![0u32; 28]);
        let y: Vec<f64> = (0..40).map(|i| if i < 12 { 1.0 } else { 0.0 }).collect();
        let data = Dataset::new(
            mixed_schema(),
            vec![Column::Cat(colors), Column::Cont(vec![1.0; 40])],
        )
        .unwrap();
        let tree = fit_cart(&data, &[0, 1], &y, 0.01, 5).unwrap();
        let Node::Split { majority_left, left, right, .. } = tree.node(0) else {
            panic!("root should split on color");
        };
        let majority_node = if *majority_left { *left } else { *right };
        let Node::Leaf { prob: maj_prob, .. } = tree.node(majority_node) else { panic!() };
        let probe = Dataset::new(
            mixed_schema(),
            vec![Column::Cat(vec![3, 2]), Column::Cont(vec![1.0, 1.0])],
        )
        .unwrap();
        let pred = tree.predict(&probe);
        assert_eq!(pred.unseen_levels, 1);
        assert_eq!(pred.scores[0], *maj_prob);
        assert_eq!(pred.scores[1], 1.0);
    }

    #[test]
    fn noise_labels_select_the_largest_cp() {
        let mut rng = SeededRng::new(57).stream(2);
        let (data, _) = mixed_fixture(58, 300);
        let y: Vec<f64> = (0..300).map(|_| if rng.random::<f64>() < 0.5 { 1.0 } else { 0.0 }).collect();
        let mut cv_rng = SeededRng::new(57).stream(3);
        let cp = cv_select_cp(&data, &[0, 1], &y, &CART_CP_GRID, 10, 20, &mut cv_rng).unwrap();
        assert_eq!(cp, 0.05);
    }

    #[test]
    fn strong_signal_selects_a_cp_that_splits() {
        let (data, y) = mixed_fixture(61, 400);
        let mut cv_rng = SeededRng::new(61).stream(4);
        let cp = cv_select_cp(&data, &[0, 1], &y, &CART_CP_GRID, 10, 20, &mut cv_rng).unwrap();
        let tree = fit_cart(&data, &[0, 1], &y, cp, 20).unwrap();
        assert!(tree.node_count() > 1, "cp {cp} should admit at least one split");
    }

    #[test]
    fn single_element_grid_short_circuits() {
        let (data, y) = mixed_fixture(62, 30);
        let mut rng = SeededRng::new(62).stream(5);
        assert_eq!(cv_select_cp(&data, &[0], &y, &[0.37], 10, 5, &mut rng).unwrap(), 0.37);
    }

    #[test]
    fn input_validation() {
        let (data, y) = mixed_fixture(63, 20);
        assert!(fit_cart(&data, &[0], &[1.0; 3], 0.01, 5).is_err());
        assert!(fit_cart(&data, &[0], &vec![0.5; 20], 0.01, 5).is_err());
        assert!(fit_cart(&data, &[9], &y, 0.01, 5).is_err());
        assert!(fit_cart(&data, &[0], &y, -0.1, 5).is_err());
        assert!(fit_cart(&data, &[0], &y, 0.01, 0).is_err());
        let mut rng = SeededRng::new(63).stream(6);
        assert!(cv_select_cp(&data, &[0], &y, &[], 10, 5, &mut rng).is_err());
        assert!(cv_select_cp(&data, &[0], &y, &[0.1, 0.2], 25, 5, &mut rng).is_err());
    }
}
