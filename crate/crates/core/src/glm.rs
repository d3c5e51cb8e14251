//! Main-effects GLMs (logistic, Poisson) fit by IRLS, with standard errors
//! from the observed Fisher information.

use serde::Serialize;

use crate::data::{Column, Dataset};
use crate::error::{Error, Result};
use crate::schema::ColumnKind;

pub const GLM_MAX_ITER: u32 = 50;
pub const GLM_TOL: f64 = 1e-8;
/// z_{0.975}, pinned so interval widths are stable across platforms.
pub const Z_975: f64 = 1.959964;
/// |eta| beyond this means the iterates are running away.
const ETA_CAP: f64 = 30.0;
/// Every observation on the correct side by at least this margin: the data
/// are linearly separated and the logistic MLE does not exist.
const SEPARATION_MARGIN: f64 = 10.0;
const RIDGE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Logistic,
    Poisson,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Logistic => "logistic",
            Family::Poisson => "poisson",
        }
    }
}

/// Provenance of one design column. Cross-dataset coefficient comparisons
/// align on this key, so it names schema levels rather than positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DesignColumn {
    Intercept,
    Dummy { column: String, level: String },
    Standardized { column: String },
}

impl DesignColumn {
    pub fn label(&self) -> String {
        match self {
            DesignColumn::Intercept => "(intercept)".to_string(),
            DesignColumn::Dummy { column, level } => format!("{column}={level}"),
            DesignColumn::Standardized { column } => column.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DesignMatrix {
    pub cols: Vec<DesignColumn>,
    data: Vec<f64>,
    n: usize,
}

impl DesignMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.cols.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.p()..(i + 1) * self.p()]
    }
}

/// Intercept plus main effects: dummy columns for every categorical level
/// but the first, standardized values for continuous columns. Dummy levels
/// that never occur and constant continuous columns are dropped; they carry
/// no information and break the normal equations.
pub fn build_design(data: &Dataset, predictors: &[usize]) -> Result<DesignMatrix> {
    let n = data.n();
    if n == 0 {
        return Err(Error::invalid("design matrix needs at least one row"));
    }
    let schema = data.schema();
    let mut cols: Vec<DesignColumn> = vec![DesignColumn::Intercept];
    let mut raw: Vec<Vec<f64>> = vec![vec![1.0; n]];
    for &c in predictors {
        let spec = schema.col(c);
        match (&spec.kind, data.column(c)) {
            (ColumnKind::Categorical { levels, .. }, Column::Cat(codes)) => {
                for (code, level) in levels.iter().enumerate().skip(1) {
                    let col: Vec<f64> = codes
                        .iter()
                        .map(|&x| if x as usize == code { 1.0 } else { 0.0 })
                        .collect();
                    if col.iter().any(|&v| v != 0.0) {
                        cols.push(DesignColumn::Dummy {
                            column: spec.name.clone(),
                            level: level.clone(),
                        });
                        raw.push(col);
                    }
                }
            }
            (ColumnKind::Continuous { .. }, Column::Cont(values)) => {
                let mean = values.iter().sum::<f64>() / n as f64;
                let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                    / (n as f64 - 1.0).max(1.0);
                let sd = var.sqrt();
                if sd > 0.0 {
                    cols.push(DesignColumn::Standardized { column: spec.name.clone() });
                    raw.push(values.iter().map(|v| (v - mean) / sd).collect());
                }
            }
            _ => unreachable!("dataset columns match the schema by construction"),
        }
    }
    let p = cols.len();
    let mut flat = vec![0.0; n * p];
    for (j, col) in raw.iter().enumerate() {
        for i in 0..n {
            flat[i * p + j] = col[i];
        }
    }
    Ok(DesignMatrix { cols, data: flat, n })
}

#[derive(Clone, Debug)]
pub struct FittedGLM {
    pub family: Family,
    pub cols: Vec<DesignColumn>,
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub converged: bool,
    pub separation: bool,
    pub ridged: bool,
    pub iterations: u32,
}

impl FittedGLM {
    pub fn k(&self) -> usize {
        self.coefficients.len()
    }

    /// Mean response per row of `x`, which must share this fit's columns.
    pub fn predict(&self, x: &DesignMatrix) -> Vec<f64> {
        assert_eq!(x.cols, self.cols, "prediction design must match the fit");
        (0..x.n())
            .map(|i| {
                let eta: f64 = x
                    .row(i)
                    .iter()
                    .zip(&self.coefficients)
                    .map(|(a, b)| a * b)
                    .sum();
                match self.family {
                    Family::Logistic => sigmoid(eta),
                    Family::Poisson => eta.exp(),
                }
            })
            .collect()
    }
}

fn sigmoid(eta: f64) -> f64 {
    1.0 / (1.0 + (-eta).exp())
}

pub fn fit_glm(
    x: &DesignMatrix,
    y: &[f64],
    family: Family,
    max_iter: u32,
    tol: f64,
) -> Result<FittedGLM> {
    let n = x.n();
    let p = x.p();
    if y.len() != n {
        return Err(Error::invalid("response length does not match the design"));
    }
    if n < p {
        return Err(Error::invalid("fewer rows than parameters"));
    }
    match family {
        Family::Logistic => {
            if y.iter().any(|&v| v != 0.0 && v != 1.0) {
                return Err(Error::invalid("logistic response must be 0/1"));
            }
        }
        Family::Poisson => {
            if y.iter().any(|&v| v < 0.0 || v.fract() != 0.0 || !v.is_finite()) {
                return Err(Error::invalid("poisson response must be nonnegative integers"));
            }
        }
    }

    let mut beta = vec![0.0; p];
    let mut converged = false;
    let mut separation = false;
    let mut ridged = false;
    let mut iterations = 0;
    let mut eta = vec![0.0; n];
    let mut mu = vec![0.0; n];
    let mut w = vec![0.0; n];

    for iter in 0..max_iter {
        iterations = iter + 1;
        for i in 0..n {
            eta[i] = x.row(i).iter().zip(&beta).map(|(a, b)| a * b).sum();
            match family {
                Family::Logistic => {
                    mu[i] = sigmoid(eta[i]);
                    w[i] = mu[i] * (1.0 - mu[i]);
                }
                Family::Poisson => {
                    mu[i] = eta[i].exp();
                    w[i] = mu[i];
                }
            }
        }

        // Score vector X^T (y - mu); convergence is a gradient condition.
        let mut grad = vec![0.0; p];
        for i in 0..n {
            let r = y[i] - mu[i];
            for (j, g) in grad.iter_mut().enumerate() {
                *g += x.row(i)[j] * r;
            }
        }
        if grad.iter().all(|g| g.abs() < tol) {
            converged = true;
            break;
        }

        let mut info = xtwx(x, &w);
        let step = match solve_spd(&mut info.clone(), &grad) {
            Ok(s) => s,
            Err(_) => {
                ridged = true;
                for j in 0..p {
                    info[j * p + j] += RIDGE;
                }
                solve_spd(&mut info, &grad)?
            }
        };
        let cand: Vec<f64> = beta.iter().zip(&step).map(|(b, s)| b + s).collect();
        let mut worst_eta = 0.0f64;
        let mut min_margin = f64::INFINITY;
        for i in 0..n {
            let e: f64 = x.row(i).iter().zip(&cand).map(|(a, b)| a * b).sum();
            worst_eta = worst_eta.max(e.abs());
            if family == Family::Logistic {
                min_margin = min_margin.min(if y[i] == 1.0 { e } else { -e });
            }
        }
        if worst_eta > ETA_CAP
            || (family == Family::Logistic && min_margin > SEPARATION_MARGIN)
        {
            // The MLE is off at infinity; keep the last stable iterate.
            separation = true;
            break;
        }
        beta = cand;
    }

    if ridged {
        log::warn!("glm information matrix was singular; solved with a 1e-8 ridge");
    }
    if separation {
        log::warn!("glm shows complete separation; coefficients capped at the last stable iterate");
    }

    // Observed information at the returned coefficients.
    for i in 0..n {
        eta[i] = x.row(i).iter().zip(&beta).map(|(a, b)| a * b).sum();
        match family {
            Family::Logistic => {
                mu[i] = sigmoid(eta[i]);
                w[i] = mu[i] * (1.0 - mu[i]);
            }
            Family::Poisson => {
                mu[i] = eta[i].exp();
                w[i] = mu[i];
            }
        }
    }
    let mut info = xtwx(x, &w);
    let cov = match invert_spd(&mut info.clone(), p) {
        Ok(c) => c,
        Err(_) => {
            ridged = true;
            for j in 0..p {
                info[j * p + j] += RIDGE;
            }
            invert_spd(&mut info, p)?
        }
    };
    let standard_errors: Vec<f64> = (0..p).map(|j| cov[j * p + j].max(0.0).sqrt()).collect();

    Ok(FittedGLM {
        family,
        cols: x.cols.clone(),
        coefficients: beta,
        standard_errors,
        converged,
        separation,
        ridged,
        iterations,
    })
}

fn xtwx(x: &DesignMatrix, w: &[f64]) -> Vec<f64> {
    let p = x.p();
    let mut a = vec![0.0; p * p];
    for i in 0..x.n() {
        let row = x.row(i);
        let wi = w[i];
        for j in 0..p {
            let rj = row[j] * wi;
            for l in j..p {
                a[j * p + l] += rj * row[l];
            }
        }
    }
    for j in 0..p {
        for l in 0..j {
            a[j * p + l] = a[l * p + j];
        }
    }
    a
}

/// Cholesky factorization in place; fails on non-positive pivots.
fn cholesky(a: &mut [f64], p: usize) -> Result<()> {
    for j in 0..p {
        for l in 0..j {
            let mut s = a[j * p + l];
            for t in 0..l {
                s -= a[j * p + t] * a[l * p + t];
            }
            a[j * p + l] = s / a[l * p + l];
        }
        let mut d = a[j * p + j];
        for t in 0..j {
            d -= a[j * p + t] * a[j * p + t];
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::invalid("matrix is not positive definite"));
        }
        a[j * p + j] = d.sqrt();
    }
    Ok(())
}

fn solve_spd(a: &mut Vec<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let p = b.len();
    cholesky(a, p)?;
    // Forward then backward substitution on L L^T x = b.
    let mut x = b.to_vec();
    for j in 0..p {
        for t in 0..j {
            x[j] -= a[j * p + t] * x[t];
        }
        x[j] /= a[j * p + j];
    }
    for j in (0..p).rev() {
        for t in (j + 1)..p {
            x[j] -= a[t * p + j] * x[t];
        }
        x[j] /= a[j * p + j];
    }
    Ok(x)
}

fn invert_spd(a: &mut Vec<f64>, p: usize) -> Result<Vec<f64>> {
    cholesky(a, p)?;
    let mut inv = vec![0.0; p * p];
    for col in 0..p {
        let mut e = vec![0.0; p];
        e[col] = 1.0;
        for j in 0..p {
            for t in 0..j {
                e[j] -= a[j * p + t] * e[t];
            }
            e[j] /= a[j * p + j];
        }
        for j in (0..p).rev() {
            for t in (j + 1)..p {
                e[j] -= a[t * p + j] * e[t];
            }
            e[j] /= a[j * p + j];
        }
        for j in 0..p {
            inv[j * p + col] = e[j];
        }
    }
    Ok(inv)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
}

pub fn glm_confidence_intervals(fit: &FittedGLM) -> Result<Vec<ConfidenceInterval>> {
    if !fit.converged {
        return Err(Error::invalid("confidence intervals need a converged fit"));
    }
    Ok(fit
        .coefficients
        .iter()
        .zip(&fit.standard_errors)
        .map(|(&b, &se)| ConfidenceInterval { lower: b - Z_975 * se, upper: b + Z_975 * se })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn intercept_only(n: usize) -> DesignMatrix {
        DesignMatrix { cols: vec![DesignColumn::Intercept], data: vec![1.0; n], n }
    }

    fn with_predictors(rows: &[Vec<f64>]) -> DesignMatrix {
        let n = rows.len();
        let p = rows[0].len() + 1;
        let mut cols = vec![DesignColumn::Intercept];
        for j in 0..p - 1 {
            cols.push(DesignColumn::Standardized { column: format!("x{j}") });
        }
        let mut data = Vec::with_capacity(n * p);
        for r in rows {
            data.push(1.0);
            data.extend_from_slice(r);
        }
        DesignMatrix { cols, data, n }
    }

    #[test]
    fn logistic_intercept_recovers_log_odds() {
        let y: Vec<f64> = (0..8).map(|i| if i < 2 { 1.0 } else { 0.0 }).collect();
        let fit = fit_glm(&intercept_only(8), &y, Family::Logistic, GLM_MAX_ITER, GLM_TOL).unwrap();
        assert!(fit.converged);
        assert_relative_eq!(fit.coefficients[0], (0.25f64 / 0.75).ln(), epsilon = 1e-6);
    }

    #[test]
    fn poisson_intercept_recovers_log_mean() {
        let y = vec![2.0, 6.0, 3.0, 5.0]; // mean 4
        let fit = fit_glm(&intercept_only(4), &y, Family::Poisson, GLM_MAX_ITER, GLM_TOL).unwrap();
        assert!(fit.converged);
        assert_relative_eq!(fit.coefficients[0], 4.0f64.ln(), epsilon = 1e-8);
    }

    // Straight Newton-Raphson on the log-likelihood with its own dense
    // Gaussian elimination; shares no code with the production IRLS path.
    fn newton_oracle(rows: &[Vec<f64>], y: &[f64], logistic: bool) -> Vec<f64> {
        let n = rows.len();
        let p = rows[0].len() + 1;
        let xr = |i: usize, j: usize| if j == 0 { 1.0 } else { rows[i][j - 1] };
        let mut beta = vec![0.0; p];
        for _ in 0..200 {
            let mut grad = vec![0.0; p];
            let mut hess = vec![vec![0.0; p + 1]; p];
            for i in 0..n {
                let eta: f64 = (0..p).map(|j| xr(i, j) * beta[j]).sum();
                let (mu, w) = if logistic {
                    let m = 1.0 / (1.0 + (-eta).exp());
                    (m, m * (1.0 - m))
                } else {
                    (eta.exp(), eta.exp())
                };
                for j in 0..p {
                    grad[j] += xr(i, j) * (y[i] - mu);
                    for l in 0..p {
                        hess[j][l] += xr(i, j) * xr(i, l) * w;
                    }
                }
            }
            for j in 0..p {
                hess[j][p] = grad[j];
            }
            // Gaussian elimination with partial pivoting.
            for col in 0..p {
                let piv = (col..p).max_by(|&a, &b| hess[a][col].abs().total_cmp(&hess[b][col].abs())).unwrap();
                hess.swap(col, piv);
                let d = hess[col][col];
                for t in col..=p {
                    hess[col][t] /= d;
                }
                for r in 0..p {
                    if r != col {
                        let f = hess[r][col];
                        for t in col..=p {
                            hess[r][t] -= f * hess[col][t];
                        }
                    }
                }
            }
            let mut moved = 0.0f64;
            for j in 0..p {
                beta[j] += hess[j][p];
                moved = moved.max(hess[j][p].abs());
            }
            if moved < 1e-12 {
                break;
            }
        }
        beta
    }

    fn logistic_fixture(seed: u64, n: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut rng = SeededRng::new(seed).stream(0);
        let mut rows = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for _ in 0..n {
            let a: f64 = rng.random_range(-1.5..1.5);
            let b: f64 = rng.random_range(-1.5..1.5);
            let pr = 1.0 / (1.0 + (-(0.3 + 0.8 * a - 1.1 * b)).exp());
            y.push(if rng.random::<f64>() < pr { 1.0 } else { 0.0 });
            rows.push(vec![a, b]);
        }
        (rows, y)
    }

    #[test]
    fn logistic_matches_newton_oracle() {
        let (rows, y) = logistic_fixture(61, 400);
        let fit = fit_glm(&with_predictors(&rows), &y, Family::Logistic, GLM_MAX_ITER, GLM_TOL)
            .unwrap();
        assert!(fit.converged);
        let want = newton_oracle(&rows, &y, true);
        for (b, w) in fit.coefficients.iter().zip(&want) {
            assert!((b - w).abs() < 1e-6, "{:?} vs {want:?}", fit.coefficients);
        }
    }

    #[test]
    fn poisson_matches_newton_oracle() {
        let mut rng = SeededRng::new(62).stream(0);
        let n = 300;
        let mut rows = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for _ in 0..n {
            let a: f64 = rng.random_range(-1.0..1.0);
            let lambda = (0.5 + 0.6 * a).exp();
            // Knuth-style Poisson draw; independent of any library sampler.
            let mut k = 0u32;
            let mut prod: f64 = rng.random();
            while prod > (-lambda).exp() {
                k += 1;
                prod *= rng.random::<f64>();
            }
            rows.push(vec![a]);
            y.push(k as f64);
        }
        let fit =
            fit_glm(&with_predictors(&rows), &y, Family::Poisson, GLM_MAX_ITER, GLM_TOL).unwrap();
        assert!(fit.converged);
        let want = newton_oracle(&rows, &y, false);
        for (b, w) in fit.coefficients.iter().zip(&want) {
            assert!((b - w).abs() < 1e-6);
        }
    }

    #[test]
    fn gradient_vanishes_at_converged_fit() {
        let (rows, y) = logistic_fixture(63, 500);
        let x = with_predictors(&rows);
        let fit = fit_glm(&x, &y, Family::Logistic, GLM_MAX_ITER, GLM_TOL).unwrap();
        assert!(fit.converged);
        let mut grad = vec![0.0; x.p()];
        for i in 0..x.n() {
            let eta: f64 = x.row(i).iter().zip(&fit.coefficients).map(|(a, b)| a * b).sum();
            let mu = 1.0 / (1.0 + (-eta).exp());
            for (j, g) in grad.iter_mut().enumerate() {
                *g += x.row(i)[j] * (y[i] - mu);
            }
        }
        assert!(grad.iter().all(|g| g.abs() < 1e-6), "{grad:?}");
    }

    #[test]
    fn standard_errors_match_finite_difference_hessian() {
        let (rows, y) = logistic_fixture(64, 400);
        let x = with_predictors(&rows);
        let fit = fit_glm(&x, &y, Family::Logistic, GLM_MAX_ITER, GLM_TOL).unwrap();
        let p = x.p();
        let ll = |beta: &[f64]| -> f64 {
            (0..x.n())
                .map(|i| {
                    let eta: f64 = x.row(i).iter().zip(beta).map(|(a, b)| a * b).sum();
                    y[i] * eta - (1.0 + eta.exp()).ln()
                })
                .sum()
        };
        let h = 1e-4;
        let mut hess = vec![vec![0.0; p]; p];
        for a in 0..p {
            for b in 0..p {
                let mut bpp = fit.coefficients.clone();
                let mut bpm = fit.coefficients.clone();
                let mut bmp = fit.coefficients.clone();
                let mut bmm = fit.coefficients.clone();
                bpp[a] += h;
                bpp[b] += h;
                bpm[a] += h;
                bpm[b] -= h;
                bmp[a] -= h;
                bmp[b] += h;
                bmm[a] -= h;
                bmm[b] -= h;
                hess[a][b] = (ll(&bpp) - ll(&bpm) - ll(&bmp) + ll(&bmm)) / (4.0 * h * h);
            }
        }
        // Invert -H by elimination to get the covariance.
        let mut aug = vec![vec![0.0; 2 * p]; p];
        for i in 0..p {
            for j in 0..p {
                aug[i][j] = -hess[i][j];
            }
            aug[i][p + i] = 1.0;
        }
        for col in 0..p {
            let piv = (col..p).max_by(|&a, &b| aug[a][col].abs().total_cmp(&aug[b][col].abs())).unwrap();
            aug.swap(col, piv);
            let d = aug[col][col];
            for t in 0..2 * p {
                aug[col][t] /= d;
            }
            for r in 0..p {
                if r != col {
                    let f = aug[r][col];
                    for t in 0..2 * p {
                        aug[r][t] -= f * aug[col][t];
                    }
                }
            }
        }
        for j in 0..p {
            let se = aug[j][p + j].sqrt();
            assert_relative_eq!(fit.standard_errors[j], se, max_relative = 1e-4);
        }
    }

    #[test]
    fn confidence_interval_arithmetic() {
        let fit = FittedGLM {
            family: Family::Logistic,
            cols: vec![DesignColumn::Intercept, DesignColumn::Standardized { column: "x".into() }],
            coefficients: vec![0.0, 1.25],
            standard_errors: vec![1.0, 0.5],
            converged: true,
            separation: false,
            ridged: false,
            iterations: 3,
        };
        let cis = glm_confidence_intervals(&fit).unwrap();
        assert_relative_eq!(cis[0].lower, -1.959964);
        assert_relative_eq!(cis[0].upper, 1.959964);
        assert_relative_eq!(cis[1].upper - cis[1].lower, 1.959964);
        let unconverged = FittedGLM { converged: false, ..fit };
        assert!(glm_confidence_intervals(&unconverged).is_err());
    }

    #[test]
    fn separation_is_flagged_not_diverged() {
        // x > 0 predicts y perfectly.
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![if i < 20 { -1.0 } else { 1.0 }]).collect();
        let y: Vec<f64> = (0..40).map(|i| if i < 20 { 0.0 } else { 1.0 }).collect();
        let fit =
            fit_glm(&with_predictors(&rows), &y, Family::Logistic, GLM_MAX_ITER, GLM_TOL).unwrap();
        assert!(fit.separation);
        assert!(!fit.converged);
        assert!(fit.coefficients.iter().all(|b| b.is_finite()));
    }

    #[test]
    fn duplicate_column_takes_ridge_path() {
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|i| {
                let v = (i as f64 / 60.0) - 0.5;
                vec![v, v]
            })
            .collect();
        let y: Vec<f64> = (0..60).map(|i| if i % 3 == 0 { 1.0 } else { 0.0 }).collect();
        let fit =
            fit_glm(&with_predictors(&rows), &y, Family::Logistic, GLM_MAX_ITER, GLM_TOL).unwrap();
        assert!(fit.ridged);
        assert!(fit.coefficients.iter().all(|b| b.is_finite()));
    }

    #[test]
    fn response_validation() {
        let x = intercept_only(4);
        assert!(fit_glm(&x, &[0.0, 0.5, 1.0, 1.0], Family::Logistic, 50, 1e-8).is_err());
        assert!(fit_glm(&x, &[1.0, 2.0, -1.0, 0.0], Family::Poisson, 50, 1e-8).is_err());
        assert!(fit_glm(&x, &[1.0, 2.5, 1.0, 0.0], Family::Poisson, 50, 1e-8).is_err());
        assert!(fit_glm(&x, &[1.0, 0.0], Family::Logistic, 50, 1e-8).is_err());
    }

    #[test]
    fn design_drops_empty_levels_and_constant_columns() {
        use crate::schema::Schema;
        let schema = Schema::from_codebook(
            "grade | categorical | a,b,c\nage | continuous | 0 | 10 | 5\nflat | continuous | 0 | 10 | 5\n",
        )
        .unwrap();
        let data = Dataset::new(
            schema,
            vec![
                Column::Cat(vec![0, 1, 0, 1]), // level c never occurs
                Column::Cont(vec![1.0, 2.0, 3.0, 4.0]),
                Column::Cont(vec![7.0; 4]), // constant
            ],
        )
        .unwrap();
        let x = build_design(&data, &[0, 1, 2]).unwrap();
        assert_eq!(
            x.cols,
            vec![
                DesignColumn::Intercept,
                DesignColumn::Dummy { column: "grade".into(), level: "b".into() },
                DesignColumn::Standardized { column: "age".into() },
            ]
        );
        // Standardization: mean 2.5, unit sample variance scaling.
        let sd = (5.0f64 / 3.0).sqrt();
        assert_relative_eq!(x.row(0)[2], -1.5 / sd, epsilon = 1e-12);
    }

    #[test]
    fn intercept_only_predicts_half_at_zero() {
        let fit = FittedGLM {
            family: Family::Logistic,
            cols: vec![DesignColumn::Intercept],
            coefficients: vec![0.0],
            standard_errors: vec![1.0],
            converged: true,
            separation: false,
            ridged: false,
            iterations: 1,
        };
        let x = intercept_only(5);
        assert_eq!(fit.predict(&x), vec![0.5; 5]);
    }
}
