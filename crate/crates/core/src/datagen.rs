//! Seeded generators for the bundled demo population and test fixtures.
//!
//! The demo table mixes categorical and continuous columns with enough
//! cross-column structure (wage depends on education, city and gender;
//! employment on wage, age and education) that joint-distribution metrics
//! have signal to lose when a synthesizer degrades.

use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::data::{Column, Dataset};
use crate::error::Result;
use crate::rng::SeededRng;
use crate::schema::Schema;

const TAG_DATAGEN: u64 = 7;

pub const DEMO_CODEBOOK: &str = "\
# demo population
city | categorical | north,south,east,west,port,hill
gender | categorical | female,male
wage | continuous | 0 | 150 | 10
employed | categorical | no,yes
visits | categorical | 0,1,2,3,4,5
age | continuous | 18 | 90 | 8
region | categorical | coast,inland,mountain
education | categorical | none,school,college,degree
";

pub fn demo_schema() -> Arc<Schema> {
    Schema::from_codebook(DEMO_CODEBOOK).expect("built-in codebook parses")
}

fn pick<R: Rng>(rng: &mut R, weights: &[f64]) -> u32 {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        u -= w;
        if u < 0.0 {
            return i as u32;
        }
    }
    weights.len() as u32 - 1
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Draws `n` rows of the demo population.
pub fn demo_dataset(seed: u64, n: usize) -> Dataset {
    let schema = demo_schema();
    let mut rng = SeededRng::new(seed).substream(&[TAG_DATAGEN, 0]);

    let city_weights = [25.0, 20.0, 15.0, 15.0, 15.0, 10.0];
    let city_premium = [4.0, 0.0, 2.0, -2.0, 6.0, -4.0];
    // city -> usual region (coast, inland, mountain)
    let city_region = [0u32, 1, 0, 2, 0, 2];

    let mut city = Vec::with_capacity(n);
    let mut gender = Vec::with_capacity(n);
    let mut wage = Vec::with_capacity(n);
    let mut employed = Vec::with_capacity(n);
    let mut visits = Vec::with_capacity(n);
    let mut age = Vec::with_capacity(n);
    let mut region = Vec::with_capacity(n);
    let mut education = Vec::with_capacity(n);

    for _ in 0..n {
        let c = pick(&mut rng, &city_weights);
        let g = rng.random_bool(0.5) as u32;
        let a = 18.0 + 72.0 * rng.random::<f64>().powf(1.2);
        let edu_w: [f64; 4] = if a < 30.0 {
            [0.05, 0.45, 0.30, 0.20]
        } else if a < 55.0 {
            [0.08, 0.40, 0.27, 0.25]
        } else {
            [0.15, 0.45, 0.25, 0.15]
        };
        let e = pick(&mut rng, &edu_w);
        let r = if rng.random_bool(0.15) {
            pick(&mut rng, &[1.0, 1.0, 1.0])
        } else {
            city_region[c as usize]
        };
        let z: f64 = StandardNormal.sample(&mut rng);
        let base = 10.0 + 9.0 * e as f64 + city_premium[c as usize] + 6.0 * g as f64;
        let w = (base * (0.30 * z).exp()).clamp(0.5, 149.5);
        let p_emp = sigmoid(-0.6 + 0.035 * (w - 25.0) - 0.025 * (a - 45.0) + 0.45 * e as f64);
        let emp = rng.random_bool(p_emp) as u32;
        let lambda = (-0.35 + 0.012 * a + 0.5 * (1 - emp) as f64).exp();
        let v: f64 = Poisson::new(lambda).expect("positive rate").sample(&mut rng);
        let v = (v as u32).min(5);

        city.push(c);
        gender.push(g);
        wage.push(w);
        employed.push(emp);
        visits.push(v);
        age.push(a);
        region.push(r);
        education.push(e);
    }

    Dataset::new(
        schema,
        vec![
            Column::Cat(city),
            Column::Cat(gender),
            Column::Cont(wage),
            Column::Cat(employed),
            Column::Cat(visits),
            Column::Cont(age),
            Column::Cat(region),
            Column::Cat(education),
        ],
    )
    .expect("generator respects its own schema")
}

pub const FIVE_CAT_CODEBOOK: &str = "\
c0 | categorical | a,b,c,d
c1 | categorical | a,b,c,d
c2 | categorical | a,b,c,d
c3 | categorical | a,b,c,d
c4 | categorical | a,b,c,d
";

/// Five four-level columns tied to one latent factor: each cell copies the
/// factor with probability 0.65, otherwise draws uniformly.
pub fn five_cat_dataset(seed: u64, n: usize) -> Dataset {
    let schema = Schema::from_codebook(FIVE_CAT_CODEBOOK).expect("built-in codebook parses");
    let mut rng = SeededRng::new(seed).substream(&[TAG_DATAGEN, 1]);
    let mut cols = vec![Vec::with_capacity(n); 5];
    for _ in 0..n {
        let z = rng.random_range(0u32..4);
        for col in cols.iter_mut() {
            let v = if rng.random_bool(0.65) { z } else { rng.random_range(0u32..4) };
            col.push(v);
        }
    }
    Dataset::new(schema, cols.into_iter().map(Column::Cat).collect())
        .expect("generator respects its own schema")
}

/// Shuffles each column's rows independently: marginals survive untouched,
/// every cross-column relationship is destroyed.
pub fn permute_columns(data: &Dataset, seed: u64) -> Dataset {
    let master = SeededRng::new(seed);
    let n = data.n();
    let cols = (0..data.q())
        .map(|j| {
            let mut rng = master.substream(&[TAG_DATAGEN, 2, j as u64]);
            let mut order: Vec<usize> = (0..n).collect();
            // Fisher-Yates, explicit so the draw sequence is pinned.
            for i in (1..n).rev() {
                let k = rng.random_range(0..=i);
                order.swap(i, k);
            }
            match data.column(j) {
                Column::Cat(v) => Column::Cat(order.iter().map(|&i| v[i]).collect()),
                Column::Cont(v) => Column::Cont(order.iter().map(|&i| v[i]).collect()),
            }
        })
        .collect();
    Dataset::new(data.schema().clone(), cols).expect("permutation preserves validity")
}

/// Bootstrap resample: `n_out` rows drawn with replacement.
pub fn resample_rows(data: &Dataset, n_out: usize, seed: u64) -> Dataset {
    let mut rng = SeededRng::new(seed).substream(&[TAG_DATAGEN, 3]);
    let idx: Vec<usize> = (0..n_out).map(|_| rng.random_range(0..data.n())).collect();
    data.take_rows(&idx)
}

/// Writes the demo inputs (codebook, original, public) into `dir`.
pub fn write_demo_inputs(dir: &std::path::Path, seed: u64, n: usize, n_public: usize) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("codebook.txt"), DEMO_CODEBOOK)?;
    let original = demo_dataset(seed, n);
    let public = demo_dataset(seed.wrapping_add(1), n_public);
    std::fs::write(dir.join("original.csv"), original.to_csv_string()?)?;
    std::fs::write(dir.join("public.csv"), public.to_csv_string()?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demo_rows_are_reproducible_and_in_range() {
        let a = demo_dataset(11, 500);
        let b = demo_dataset(11, 500);
        assert_eq!(a.n(), 500);
        for j in 0..a.q() {
            assert_eq!(a.column(j), b.column(j));
        }
        let wage = a.cont(2).unwrap();
        assert!(wage.iter().all(|&w| (0.5..=149.5).contains(&w)));
        let age = a.cont(5).unwrap();
        assert!(age.iter().all(|&x| (18.0..90.0).contains(&x)));
        // both genders show up in every city at this size
        let city = a.cat(0).unwrap();
        let gender = a.cat(1).unwrap();
        let mut seen = [[false; 2]; 6];
        for (c, g) in city.iter().zip(gender) {
            seen[*c as usize][*g as usize] = true;
        }
        assert!(seen.iter().flatten().all(|&s| s));
    }

    #[test]
    fn demo_seeds_differ() {
        let a = demo_dataset(11, 200);
        let b = demo_dataset(12, 200);
        assert_ne!(a.cont(2).unwrap(), b.cont(2).unwrap());
    }

    #[test]
    fn permutation_keeps_marginals_and_breaks_joints() {
        let a = demo_dataset(13, 400);
        let p = permute_columns(&a, 5);
        for j in 0..a.q() {
            match (a.column(j), p.column(j)) {
                (Column::Cat(x), Column::Cat(y)) => {
                    let mut xs = x.clone();
                    let mut ys = y.clone();
                    xs.sort_unstable();
                    ys.sort_unstable();
                    assert_eq!(xs, ys);
                }
                (Column::Cont(x), Column::Cont(y)) => {
                    let mut xs = x.clone();
                    let mut ys = y.clone();
                    xs.sort_by(f64::total_cmp);
                    ys.sort_by(f64::total_cmp);
                    assert_eq!(xs, ys);
                }
                _ => unreachable!(),
            }
        }
        // education-wage link: permutation should flatten the gap between
        // mean wages of the lowest and highest education levels.
        let gap = |d: &Dataset| {
            let edu = d.cat(7).unwrap();
            let wage = d.cont(2).unwrap();
            let mut sums = [0.0f64; 4];
            let mut counts = [0usize; 4];
            for (e, w) in edu.iter().zip(wage) {
                sums[*e as usize] += w;
                counts[*e as usize] += 1;
            }
            sums[3] / counts[3] as f64 - sums[0] / counts[0] as f64
        };
        assert!(gap(&a) > 10.0);
        assert!(gap(&p).abs() < gap(&a) / 2.0);
    }

    #[test]
    fn five_cat_columns_covary() {
        let d = five_cat_dataset(17, 2000);
        let a = d.cat(0).unwrap();
        let b = d.cat(1).unwrap();
        let agree = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / 2000.0;
        // independent columns would agree 25% of the time
        assert!(agree > 0.4, "agreement {agree}");
    }

    #[test]
    fn resample_draws_from_source_rows() {
        let d = demo_dataset(19, 50);
        let r = resample_rows(&d, 120, 3);
        assert_eq!(r.n(), 120);
        let src = d.cont(2).unwrap();
        assert!(r.cont(2).unwrap().iter().all(|w| src.contains(w)));
    }
}
