//! Challenge-style scores: randomized 3-way density comparison, randomized
//! subset-count classification, and a city-level wage score built from Gini
//! indices and gender-gap rankings. Each is oriented so 0 is best.

use rand::Rng;
use std::collections::BTreeMap;

use crate::data::{BinnedView, Column, Dataset};
use crate::error::{Error, Result};
use crate::schema::ColumnKind;

pub const NIST_CLUSTERING_REPS: usize = 100;
pub const NIST_CLASSIFICATION_REPS: usize = 300;
/// Proportion differences are floored here before the log; also the
/// normalizer of the classification score.
const CLASSIFICATION_FLOOR: f64 = 1e-3;

fn check_same_shape(orig: &BinnedView, synth: &BinnedView) -> Result<()> {
    if **orig.schema() != **synth.schema() {
        return Err(Error::invalid("views must share a schema"));
    }
    if orig.n() == 0 || synth.n() == 0 {
        return Err(Error::invalid("views must be non-empty"));
    }
    Ok(())
}

/// Half L1 distance between the two empirical joints on `cols`.
fn joint_tv(orig: &BinnedView, synth: &BinnedView, cols: &[usize]) -> f64 {
    let mut cells: BTreeMap<Vec<u32>, [u64; 2]> = BTreeMap::new();
    for r in 0..orig.n() {
        let key: Vec<u32> = cols.iter().map(|&c| orig.col(c)[r]).collect();
        cells.entry(key).or_default()[0] += 1;
    }
    for r in 0..synth.n() {
        let key: Vec<u32> = cols.iter().map(|&c| synth.col(c)[r]).collect();
        cells.entry(key).or_default()[1] += 1;
    }
    let (no, ns) = (orig.n() as f64, synth.n() as f64);
    0.5 * cells
        .values()
        .map(|&[a, b]| (a as f64 / no - b as f64 / ns).abs())
        .sum::<f64>()
}

/// Mean over `reps` random 3-column draws of the total variation distance
/// between the corresponding 3-way relative-frequency tables.
pub fn nist_clustering<R: Rng>(
    orig: &BinnedView,
    synth: &BinnedView,
    reps: usize,
    rng: &mut R,
) -> Result<f64> {
    check_same_shape(orig, synth)?;
    if orig.q() < 3 {
        return Err(Error::invalid("clustering score needs at least 3 columns"));
    }
    if reps == 0 {
        return Err(Error::invalid("need at least one repetition"));
    }
    let mut acc = 0.0;
    for _ in 0..reps {
        let cols = rand::seq::index::sample(rng, orig.q(), 3).into_vec();
        acc += joint_tv(orig, synth, &cols);
    }
    Ok(acc / reps as f64)
}

#[derive(Clone, Debug)]
enum Constraint {
    /// Row passes when the level bit for its code is set.
    Subset { col: usize, mask: u64 },
    /// Row passes when its bin falls in [lo, hi].
    Range { col: usize, lo: u32, hi: u32 },
}

fn satisfied_share(view: &BinnedView, constraints: &[Constraint]) -> f64 {
    let mut hits = 0usize;
    for r in 0..view.n() {
        let ok = constraints.iter().all(|c| match *c {
            Constraint::Subset { col, mask } => mask >> view.col(col)[r] & 1 == 1,
            Constraint::Range { col, lo, hi } => {
                let b = view.col(col)[r];
                lo <= b && b <= hi
            }
        });
        hits += ok as usize;
    }
    hits as f64 / view.n() as f64
}

/// Randomized count queries over a third of the columns: categorical columns
/// constrain to a random non-empty proper level subset (the full set only
/// when a single level exists), binned continuous columns to a random
/// contiguous bin range. Log proportion gaps are floored at 1e-3,
/// root-mean-squared, normalized by |ln 1e-3|, and flipped so a perfect
/// copy scores 0.
pub fn nist_classification<R: Rng>(
    orig: &BinnedView,
    synth: &BinnedView,
    reps: usize,
    rng: &mut R,
) -> Result<f64> {
    check_same_shape(orig, synth)?;
    if reps == 0 {
        return Err(Error::invalid("need at least one repetition"));
    }
    let q = orig.q();
    for c in 0..q {
        if matches!(orig.schema().col(c).kind, ColumnKind::Categorical { .. })
            && orig.cardinality(c) > 63
        {
            return Err(Error::invalid("categorical column too wide for subset draws"));
        }
    }
    let pick = q.div_ceil(3);
    let mut sum_sq = 0.0;
    for _ in 0..reps {
        let cols = rand::seq::index::sample(rng, q, pick).into_vec();
        let mut constraints = Vec::with_capacity(pick);
        for &col in &cols {
            let card = orig.cardinality(col);
            match orig.schema().col(col).kind {
                ColumnKind::Categorical { .. } => {
                    let mask = if card == 1 {
                        1
                    } else {
                        rng.random_range(1..(1u64 << card) - 1)
                    };
                    constraints.push(Constraint::Subset { col, mask });
                }
                ColumnKind::Continuous { .. } => {
                    let lo = rng.random_range(0..card);
                    let hi = rng.random_range(lo..card);
                    constraints.push(Constraint::Range { col, lo, hi });
                }
            }
        }
        let gap = (satisfied_share(orig, &constraints) - satisfied_share(synth, &constraints))
            .abs()
            .max(CLASSIFICATION_FLOOR);
        sum_sq += gap.ln() * gap.ln();
    }
    let rms = (sum_sq / reps as f64).sqrt() / CLASSIFICATION_FLOOR.ln().abs();
    Ok(1.0 - rms.clamp(0.0, 1.0))
}

/// Mean absolute difference Gini: sum |x_i - x_j| / (2 n^2 mean).
pub fn gini(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::invalid("gini needs at least one value"));
    }
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::invalid("gini needs finite nonnegative values"));
    }
    let total: f64 = values.iter().sum();
    if total <= 0.0 {
        return Err(Error::invalid("undefined Gini for an all-zero vector"));
    }
    let mut xs = values.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    // Sorted rank form of the pairwise sum.
    let weighted: f64 = xs
        .iter()
        .enumerate()
        .map(|(i, x)| (2.0 * (i as f64 + 1.0) - n - 1.0) * x)
        .sum();
    Ok(weighted / (n * total))
}

struct CityStats {
    gini: f64,
    /// Mean wage of gender code 1 minus gender code 0.
    gap: f64,
}

fn city_table(
    data: &Dataset,
    city: usize,
    gender: usize,
    wage: usize,
) -> BTreeMap<u32, CityStats> {
    let Column::Cat(cities) = data.column(city) else { unreachable!() };
    let Column::Cat(genders) = data.column(gender) else { unreachable!() };
    let Column::Cont(wages) = data.column(wage) else { unreachable!() };
    let mut grouped: BTreeMap<u32, (Vec<f64>, [f64; 2], [usize; 2])> = BTreeMap::new();
    for r in 0..data.n() {
        let slot = grouped.entry(cities[r]).or_default();
        slot.0.push(wages[r]);
        slot.1[genders[r] as usize] += wages[r];
        slot.2[genders[r] as usize] += 1;
    }
    let mut out = BTreeMap::new();
    for (code, (wages, sums, counts)) in grouped {
        // A city is rankable only with both genders present and a defined
        // wage Gini; others are treated as absent.
        if counts[0] == 0 || counts[1] == 0 {
            continue;
        }
        let Ok(g) = gini(&wages) else { continue };
        out.insert(
            code,
            CityStats { gini: g, gap: sums[1] / counts[1] as f64 - sums[0] / counts[0] as f64 },
        );
    }
    out
}

/// Dense rank of each shared city when sorted by gap, ties broken by code.
fn gap_ranks(stats: &BTreeMap<u32, CityStats>, shared: &[u32]) -> BTreeMap<u32, usize> {
    let mut order: Vec<u32> = shared.to_vec();
    order.sort_by(|&a, &b| stats[&a].gap.total_cmp(&stats[&b].gap).then(a.cmp(&b)));
    order.into_iter().enumerate().map(|(rank, code)| (code, rank)).collect()
}

/// Average of two sub-scores over the original's rankable cities: squared
/// Gini deviation, and squared normalized gender-gap rank displacement.
/// Cities the synthetic data loses contribute the maximum 1 to both.
pub fn nist_regression(
    orig: &Dataset,
    synth: &Dataset,
    city_col: &str,
    gender_col: &str,
    wage_col: &str,
) -> Result<f64> {
    if **orig.schema() != **synth.schema() {
        return Err(Error::invalid("datasets must share a schema"));
    }
    let schema = orig.schema();
    let resolve = |name: &str| {
        schema.index_of(name).ok_or_else(|| Error::invalid(format!("unknown column {name:?}")))
    };
    let city = resolve(city_col)?;
    let gender = resolve(gender_col)?;
    let wage = resolve(wage_col)?;
    if !matches!(schema.col(city).kind, ColumnKind::Categorical { .. }) {
        return Err(Error::invalid("city column must be categorical"));
    }
    match &schema.col(gender).kind {
        ColumnKind::Categorical { levels, .. } if levels.len() == 2 => {}
        _ => return Err(Error::invalid("gender column must be binary categorical")),
    }
    if !matches!(schema.col(wage).kind, ColumnKind::Continuous { .. }) {
        return Err(Error::invalid("wage column must be continuous"));
    }

    let table_o = city_table(orig, city, gender, wage);
    let table_s = city_table(synth, city, gender, wage);
    let cities: Vec<u32> = table_o.keys().copied().collect();
    let shared: Vec<u32> = cities.iter().copied().filter(|c| table_s.contains_key(c)).collect();
    if shared.len() < 2 {
        return Err(Error::invalid("fewer than 2 shared cities"));
    }
    let ranks_o = gap_ranks(&table_o, &shared);
    let ranks_s = gap_ranks(&table_s, &shared);
    let span = (shared.len() - 1) as f64;
    let mut sub_gini = 0.0;
    let mut sub_rank = 0.0;
    for code in &cities {
        if table_s.contains_key(code) {
            sub_gini += (table_o[code].gini - table_s[code].gini).powi(2);
            sub_rank +=
                ((ranks_o[code] as f64 - ranks_s[code] as f64) / span).powi(2);
        } else {
            sub_gini += 1.0;
            sub_rank += 1.0;
        }
    }
    let m = cities.len() as f64;
    Ok((sub_gini / m + sub_rank / m) / 2.0)
}
