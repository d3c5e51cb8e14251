//! Shared distribution tails used by the metric battery.

use crate::error::{Error, Result};

/// Upper tail P(X >= stat) of a chi-square distribution with `df` degrees of
/// freedom. Computed through the regularized upper incomplete gamma function,
/// which stays accurate for very small tail masses instead of cancelling to 0.
pub fn chi_square_upper_tail(stat: f64, df: f64) -> Result<f64> {
    if !(stat >= 0.0) || !(df > 0.0) {
        return Err(Error::invalid(format!(
            "chi-square tail needs stat >= 0 and df > 0, got stat={stat}, df={df}"
        )));
    }
    if stat == 0.0 {
        return Ok(1.0);
    }
    Ok(statrs::function::gamma::gamma_ur(df / 2.0, stat / 2.0))
}

/// Kolmogorov limiting complementary CDF Q(z) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 z^2).
///
/// Series selection follows Numerical Recipes: the dual theta-function form
/// converges in a handful of terms on either side of z ~ 1.18.
pub fn kolmogorov_q(z: f64) -> f64 {
    if z <= 0.0 {
        return 1.0;
    }
    if z < 1.18 {
        let h = 1.233_700_550_136_169_7 / (z * z);
        if h > 700.0 {
            // exp(-h) underflows and the CDF is 0 to machine precision.
            return 1.0;
        }
        let y = (-h).exp();
        let p = 2.256_758_334_191_025 * h.sqrt() * (y + y.powi(9) + y.powi(25) + y.powi(49));
        (1.0 - p).clamp(0.0, 1.0)
    } else {
        let x = (-2.0 * z * z).exp();
        (2.0 * (x - x.powi(4) + x.powi(9))).clamp(0.0, 1.0)
    }
}

/// Two-sample Kolmogorov-Smirnov statistic sup_t |F_a(t) - F_b(t)|.
///
/// Merge walk over the two sorted samples; at tied values both ECDFs step
/// together before the gap is measured.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("ks statistic needs two non-empty samples"));
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let t = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= t {
            i += 1;
        }
        while j < ys.len() && ys[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Mean of a slice; caller guarantees non-empty.
pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}
