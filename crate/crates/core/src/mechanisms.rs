//! Noise primitives: Laplace, Gaussian, and exponential selection.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::budget::{PrivacyParams, SensitivityBound};
use crate::error::{Error, Result};
use crate::rng::NoiseRng;

/// Draws Lap(0, b) by inverting the CDF. u = -0.5 would map to -infinity;
/// it has probability ~2^-53 and is resampled.
pub fn sample_laplace(b: f64, rng: &mut NoiseRng) -> f64 {
    loop {
        let u: f64 = rng.random::<f64>() - 0.5;
        if u == -0.5 {
            continue;
        }
        return -b * u.signum() * (1.0 - 2.0 * u.abs()).ln();
    }
}

/// Density of Lap(0, b) at t.
pub fn laplace_density(b: f64, t: f64) -> f64 {
    (-t.abs() / b).exp() / (2.0 * b)
}

pub fn laplace_mechanism(
    value: f64,
    sens: SensitivityBound,
    epsilon: f64,
    rng: &mut NoiseRng,
) -> Result<f64> {
    let l1 = sens
        .l1
        .ok_or_else(|| Error::invalid("laplace mechanism needs an l1 sensitivity bound"))?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(value + sample_laplace(l1 / epsilon, rng))
}

/// Analytic-free calibration: sigma = l2 / eps * sqrt(2 ln(1.25/delta)).
/// Only tight for eps <= 1; larger eps still satisfies the guarantee but
/// wastes budget, so callers get a warning rather than an error.
pub fn gaussian_sigma(l2: f64, params: PrivacyParams) -> Result<f64> {
    if params.delta <= 0.0 {
        return Err(Error::invalid(
            "gaussian mechanism requires delta > 0; use laplace for pure DP",
        ));
    }
    if params.epsilon > 1.0 {
        log::warn!(
            "gaussian calibration is loose for epsilon > 1 (got {})",
            params.epsilon
        );
    }
    Ok(l2 / params.epsilon * (2.0 * (1.25 / params.delta).ln()).sqrt())
}

pub fn gaussian_mechanism(
    value: f64,
    sens: SensitivityBound,
    params: PrivacyParams,
    rng: &mut NoiseRng,
) -> Result<f64> {
    let l2 = sens
        .l2
        .ok_or_else(|| Error::invalid("gaussian mechanism needs an l2 sensitivity bound"))?;
    let sigma = gaussian_sigma(l2, params)?;
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::invalid(e.to_string()))?;
    Ok(value + normal.sample(rng))
}

/// Selects an index with probability proportional to exp(eps * u_i / (2 * l1)).
/// Qualities are max-shifted before exponentiation so arbitrarily large
/// scores cannot overflow.
pub fn exponential_mechanism(
    qualities: &[f64],
    sens: SensitivityBound,
    epsilon: f64,
    rng: &mut NoiseRng,
) -> Result<usize> {
    let l1 = sens
        .l1
        .ok_or_else(|| Error::invalid("exponential mechanism needs an l1 sensitivity bound"))?;
    if qualities.is_empty() {
        return Err(Error::invalid("exponential mechanism needs at least one candidate"));
    }
    if qualities.iter().any(|q| !q.is_finite()) {
        return Err(Error::invalid("candidate qualities must be finite"));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    if l1 <= 0.0 {
        return Err(Error::invalid("exponential mechanism needs l1 > 0"));
    }
    let scale = epsilon / (2.0 * l1);
    let top = qualities.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = qualities.iter().map(|q| ((q - top) * scale).exp()).collect();
    let total: f64 = weights.iter().sum();
    let mut ticket = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        ticket -= w;
        if ticket <= 0.0 {
            return Ok(i);
        }
    }
    Ok(weights.len() - 1)
}

/// Closed-form selection probabilities of the exponential mechanism.
pub fn exponential_probabilities(qualities: &[f64], l1: f64, epsilon: f64) -> Vec<f64> {
    let scale = epsilon / (2.0 * l1);
    let top = qualities.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = qualities.iter().map(|q| ((q - top) * scale).exp()).collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use crate::stats::chi_square_upper_tail;
    use approx::assert_relative_eq;

    #[test]
    fn laplace_needs_l1() {
        let mut rng = SeededRng::new(7).stream(0);
        let sens = SensitivityBound::l2(1.0).unwrap();
        assert!(laplace_mechanism(0.0, sens, 1.0, &mut rng).is_err());
    }

    #[test]
    fn laplace_noise_vanishes_at_huge_epsilon() {
        let mut rng = SeededRng::new(11).stream(0);
        let sens = SensitivityBound::l1(1.0).unwrap();
        for _ in 0..10_000 {
            let out = laplace_mechanism(42.0, sens, 1e6, &mut rng).unwrap();
            // P(|noise| > 1e-4) = exp(-100); seeing it would mean a bug.
            assert!((out - 42.0).abs() <= 1e-4);
        }
    }

    #[test]
    fn laplace_density_ratio_bounded_by_exp_eps() {
        for &eps in &[0.1f64, 1.0, 5.0] {
            let b = 1.0 / eps; // l1 = 1
            let bound = eps.exp() * (1.0 + 1e-12);
            let lo = -10.0 * b;
            let hi = 10.0 * b;
            let steps = 4001;
            for i in 0..steps {
                let t = lo + (hi - lo) * i as f64 / (steps - 1) as f64;
                // Neighboring datasets shift the center by at most l1 = 1.
                let ratio = laplace_density(b, t) / laplace_density(b, t - 1.0);
                assert!(ratio <= bound, "eps={eps} t={t} ratio={ratio}");
            }
        }
    }

    #[test]
    fn laplace_spread_matches_scale() {
        let mut rng = SeededRng::new(3).stream(1);
        let sens = SensitivityBound::l1(2.0).unwrap();
        let eps = 0.5;
        let n = 200_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let x = laplace_mechanism(0.0, sens, eps, &mut rng).unwrap();
            acc += x * x;
        }
        // Var(Lap(b)) = 2 b^2 with b = 4.
        let var = acc / n as f64;
        assert_relative_eq!(var, 32.0, max_relative = 0.05);
    }

    #[test]
    fn gaussian_sigma_formula() {
        let sigma = gaussian_sigma(1.0, PrivacyParams::new(1.0, 0.001).unwrap()).unwrap();
        assert_relative_eq!(sigma, (2.0 * 1250.0_f64.ln()).sqrt());
        assert!((sigma - 3.7765).abs() < 5e-4);
        let sigma = gaussian_sigma(3.0, PrivacyParams::new(0.5, 1e-6).unwrap()).unwrap();
        assert_relative_eq!(sigma, 6.0 * (2.0 * 1.25e6_f64.ln()).sqrt());
    }

    #[test]
    fn gaussian_rejects_delta_zero() {
        let mut rng = SeededRng::new(5).stream(0);
        let sens = SensitivityBound::l2(1.0).unwrap();
        let params = PrivacyParams::new(1.0, 0.0).unwrap();
        assert!(gaussian_mechanism(0.0, sens, params, &mut rng).is_err());
    }

    #[test]
    fn gaussian_noise_spread_matches_sigma() {
        let mut rng = SeededRng::new(9).stream(2);
        let sens = SensitivityBound::both(1.0, 1.0).unwrap();
        let params = PrivacyParams::new(1.0, 0.001).unwrap();
        let sigma = gaussian_sigma(1.0, params).unwrap();
        let n = 200_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let x = gaussian_mechanism(0.0, sens, params, &mut rng).unwrap();
            acc += x * x;
        }
        assert_relative_eq!((acc / n as f64).sqrt(), sigma, max_relative = 0.02);
    }

    #[test]
    fn exponential_two_candidate_probability() {
        // qualities {0, q}, eps = 2, l1 = 1: P(second) = e^q / (1 + e^q).
        let mut rng = SeededRng::new(13).stream(0);
        let sens = SensitivityBound::l1(1.0).unwrap();
        let q = 1.0;
        let n = 100_000;
        let mut hits = 0u64;
        for _ in 0..n {
            if exponential_mechanism(&[0.0, q], sens, 2.0, &mut rng).unwrap() == 1 {
                hits += 1;
            }
        }
        let expect = q.exp() / (1.0 + q.exp());
        assert_relative_eq!(expect, 0.7311, max_relative = 1e-4);
        let freq = hits as f64 / n as f64;
        assert!((freq - expect).abs() < 0.005, "freq={freq} expect={expect}");
    }

    #[test]
    fn exponential_frequencies_match_softmax() {
        let qualities = [0.0, 1.0, -0.5, 2.0];
        let eps = 1.3;
        let l1 = 1.0;
        let probs = exponential_probabilities(&qualities, l1, eps);
        assert_relative_eq!(probs.iter().sum::<f64>(), 1.0, epsilon = 1e-12);

        let mut rng = SeededRng::new(17).stream(0);
        let sens = SensitivityBound::l1(l1).unwrap();
        let n = 100_000u64;
        let mut counts = [0u64; 4];
        for _ in 0..n {
            counts[exponential_mechanism(&qualities, sens, eps, &mut rng).unwrap()] += 1;
        }
        let stat: f64 = counts
            .iter()
            .zip(&probs)
            .map(|(&c, &p)| {
                let e = p * n as f64;
                (c as f64 - e).powi(2) / e
            })
            .sum();
        let p = chi_square_upper_tail(stat, 3.0).unwrap();
        assert!(p > 0.001, "chi2 GOF rejected: stat={stat} p={p}");
    }

    #[test]
    fn exponential_near_uniform_at_tiny_epsilon() {
        let qualities = [100.0, -40.0, 3.0];
        let mut rng = SeededRng::new(19).stream(0);
        let sens = SensitivityBound::l1(1.0).unwrap();
        let n = 100_000u64;
        let mut counts = [0u64; 3];
        for _ in 0..n {
            counts[exponential_mechanism(&qualities, sens, 1e-9, &mut rng).unwrap()] += 1;
        }
        let e = n as f64 / 3.0;
        let stat: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
        let p = chi_square_upper_tail(stat, 2.0).unwrap();
        assert!(p > 0.01, "not uniform: counts={counts:?} p={p}");
    }

    #[test]
    fn exponential_handles_huge_scores() {
        let mut rng = SeededRng::new(23).stream(0);
        let sens = SensitivityBound::l1(1.0).unwrap();
        let idx = exponential_mechanism(&[1e9, 1e9 + 40.0], sens, 1.0, &mut rng).unwrap();
        // P(first) = e^-20, so the second wins.
        assert_eq!(idx, 1);
        assert!(exponential_mechanism(&[], sens, 1.0, &mut rng).is_err());
        assert!(exponential_mechanism(&[f64::NAN], sens, 1.0, &mut rng).is_err());
    }
}
