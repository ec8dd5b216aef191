//! AR(1)-GARCH(1,1) model with Student-t innovations: likelihood, fitting,
//! filtering to iid standardized residuals, one-step forecasting, simulation,
//! and serial-correlation diagnostics.
//!
//! Model:
//!   R_t     = mu_t + sigma_t * Z_t
//!   mu_t    = phi * R_{t-1}
//!   sigma_t^2 = alpha0 + alpha1 * R_{t-1}^2 + beta1 * sigma_{t-1}^2
//!
//! The recursion is seeded with sigma_1^2 = sample variance and mu_1 = 0;
//! the likelihood conditions on the first observation and sums from t = 2.

use rand::prelude::*;
use rand_distr::StudentT;
use serde::{Deserialize, Serialize};

use crate::data::ReturnSeries;
use crate::error::{Error, Result};
use crate::optim::NelderMead;
use crate::special::{chi2_sf, StandardizedT};

/// AR(1)-GARCH(1,1)-t parameter vector. Variance parameters are in the
/// square of the return units (percent squared for percent returns).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GarchParams {
    pub phi: f64,
    pub alpha0: f64,
    pub alpha1: f64,
    pub beta1: f64,
    /// Student-t degrees of freedom; fixed during fitting.
    pub nu: f64,
}

impl GarchParams {
    pub fn new(phi: f64, alpha0: f64, alpha1: f64, beta1: f64, nu: f64) -> Result<Self> {
        let p = Self {
            phi,
            alpha0,
            alpha1,
            beta1,
            nu,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha0 > 0.0) {
            return Err(Error::InvalidParams(format!(
                "alpha0 must be positive, got {}",
                self.alpha0
            )));
        }
        if self.alpha1 < 0.0 || self.beta1 < 0.0 {
            return Err(Error::InvalidParams(format!(
                "alpha1 and beta1 must be non-negative, got {} and {}",
                self.alpha1, self.beta1
            )));
        }
        if self.alpha1 + self.beta1 >= 1.0 {
            return Err(Error::InvalidParams(format!(
                "alpha1 + beta1 = {} violates covariance stationarity (< 1)",
                self.alpha1 + self.beta1
            )));
        }
        if !(self.nu > 2.0) {
            return Err(Error::InvalidParams(format!(
                "nu must exceed 2 for a finite innovation variance, got {}",
                self.nu
            )));
        }
        Ok(())
    }
}

/// Innovation convention for the simulator. Fitting always uses the
/// standardized (unit-variance) convention, so sigma_t is the conditional
/// standard deviation; the simulator also supports classical t innovations
/// with variance nu/(nu-2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InnovationConvention {
    StandardizedT,
    RawT,
}

/// Conditional means, volatilities, and standardized residuals, aligned
/// with the input series.
#[derive(Debug, Clone)]
pub struct FilterOutput {
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    pub z: Vec<f64>,
}

/// One-step-ahead conditional mean and volatility.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Forecast {
    pub mu_next: f64,
    pub sigma_next: f64,
}

/// Robust (sandwich) standard errors for (phi, alpha0, alpha1, beta1).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RobustSe {
    pub phi: f64,
    pub alpha0: f64,
    pub alpha1: f64,
    pub beta1: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    pub params: GarchParams,
    pub loglik: f64,
    /// None when the sandwich covariance could not be formed; the reason is
    /// then recorded in `warnings`.
    pub robust_se: Option<RobustSe>,
    pub converged: bool,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct FitConfig {
    pub nu: f64,
    pub max_iterations: usize,
    pub tol_rel: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            nu: 4.0,
            max_iterations: 500,
            tol_rel: 1e-9,
        }
    }
}

fn sample_variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

/// Per-observation log-likelihood terms for t = 2..T, without enforcing the
/// stationarity constraint: the derivative machinery needs the likelihood in
/// a small neighborhood that may step slightly outside the admissible set.
/// Returns None when any conditional variance or term is non-finite.
fn loglik_terms(
    params: &GarchParams,
    r: &[f64],
    sigma2_seed: f64,
    out: &mut Vec<f64>,
) -> Option<()> {
    out.clear();
    let dist = StandardizedT::new(params.nu);
    let mut sigma2 = sigma2_seed;
    for t in 1..r.len() {
        let prev = r[t - 1];
        sigma2 = params.alpha0 + params.alpha1 * prev * prev + params.beta1 * sigma2;
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return None;
        }
        let sigma = sigma2.sqrt();
        let z = (r[t] - params.phi * prev) / sigma;
        let term = dist.ln_pdf(z) - sigma.ln();
        if !term.is_finite() {
            return None;
        }
        out.push(term);
    }
    Some(())
}

/// Streaming total of the same terms, allocation-free for the optimizer.
fn loglik_sum(params: &GarchParams, r: &[f64], sigma2_seed: f64) -> Option<f64> {
    let dist = StandardizedT::new(params.nu);
    let mut sigma2 = sigma2_seed;
    let mut total = 0.0;
    for t in 1..r.len() {
        let prev = r[t - 1];
        sigma2 = params.alpha0 + params.alpha1 * prev * prev + params.beta1 * sigma2;
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return None;
        }
        let sigma = sigma2.sqrt();
        let z = (r[t] - params.phi * prev) / sigma;
        total += dist.ln_pdf(z) - sigma.ln();
    }
    total.is_finite().then_some(total)
}

/// Conditional log-likelihood of the series under `params`: the sum over
/// t = 2..T of the unit-variance Student-t log density of the standardized
/// residual minus log sigma_t.
pub fn log_likelihood(params: &GarchParams, series: &ReturnSeries) -> Result<f64> {
    params.validate()?;
    if series.len() < 10 {
        return Err(Error::InvalidInput(format!(
            "log-likelihood needs at least 10 observations, got {}",
            series.len()
        )));
    }
    let seed = sample_variance(series.returns());
    if seed == 0.0 {
        return Err(Error::Degenerate("zero-variance series".into()));
    }
    loglik_sum(params, series.returns(), seed).ok_or(Error::NonFiniteLikelihood)
}

/// Run the conditional mean/variance recursion over the whole series and
/// standardize. The reconstruction identity R_t = mu_t + sigma_t * z_t holds
/// exactly by construction.
pub fn filter(params: &GarchParams, series: &ReturnSeries) -> Result<FilterOutput> {
    params.validate()?;
    let r = series.returns();
    if r.len() < 2 {
        return Err(Error::InvalidInput(
            "filtering needs at least 2 observations".into(),
        ));
    }
    let seed = sample_variance(r);
    if seed == 0.0 {
        return Err(Error::Degenerate("zero-variance series".into()));
    }
    let mut mu = Vec::with_capacity(r.len());
    let mut sigma = Vec::with_capacity(r.len());
    let mut z = Vec::with_capacity(r.len());
    let mut sigma2 = seed;
    mu.push(0.0);
    sigma.push(seed.sqrt());
    z.push(r[0] / seed.sqrt());
    for t in 1..r.len() {
        let prev = r[t - 1];
        sigma2 = params.alpha0 + params.alpha1 * prev * prev + params.beta1 * sigma2;
        let s = sigma2.sqrt();
        let m = params.phi * prev;
        mu.push(m);
        sigma.push(s);
        z.push((r[t] - m) / s);
    }
    Ok(FilterOutput { mu, sigma, z })
}

/// One-step-ahead forecast from the last observation and the last filtered
/// volatility: mu = phi * R_T, sigma^2 = alpha0 + alpha1 R_T^2 + beta1 sigma_T^2.
pub fn forecast(params: &GarchParams, series: &ReturnSeries, filter: &FilterOutput) -> Forecast {
    let r_last = *series.returns().last().expect("non-empty series");
    let sigma_last = *filter.sigma.last().expect("non-empty filter");
    let sigma2_next =
        params.alpha0 + params.alpha1 * r_last * r_last + params.beta1 * sigma_last * sigma_last;
    Forecast {
        mu_next: params.phi * r_last,
        sigma_next: sigma2_next.sqrt(),
    }
}

/// Simulate a return path. Deterministic for a fixed seed; the first
/// `burn_in` observations are discarded.
pub fn simulate(
    params: &GarchParams,
    n: usize,
    burn_in: usize,
    seed: u64,
    convention: InnovationConvention,
) -> Result<ReturnSeries> {
    params.validate()?;
    if n == 0 {
        return Err(Error::InvalidInput("simulation needs n >= 1".into()));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let t_dist = StudentT::new(params.nu).expect("nu > 2");
    let scale = match convention {
        InnovationConvention::StandardizedT => ((params.nu - 2.0) / params.nu).sqrt(),
        InnovationConvention::RawT => 1.0,
    };

    let total = n + burn_in;
    let mut returns = Vec::with_capacity(total);
    let mut sigma2 = params.alpha0 / (1.0 - params.alpha1 - params.beta1);
    let mut prev_r = 0.0;
    for t in 0..total {
        if t > 0 {
            sigma2 = params.alpha0 + params.alpha1 * prev_r * prev_r + params.beta1 * sigma2;
        }
        let z: f64 = rng.sample(t_dist);
        let r = params.phi * prev_r + sigma2.sqrt() * scale * z;
        returns.push(r);
        prev_r = r;
    }
    ReturnSeries::from_returns("simulated", returns.split_off(burn_in))
}

/// Ljung-Box portmanteau statistic over the first `lags` autocorrelations
/// and its chi-square p-value.
pub fn ljung_box(x: &[f64], lags: usize) -> Result<(f64, f64)> {
    let t = x.len();
    if lags < 1 || t <= lags {
        return Err(Error::InvalidInput(format!(
            "Ljung-Box needs length > lags >= 1, got length {t}, lags {lags}"
        )));
    }
    let mean = x.iter().sum::<f64>() / t as f64;
    let denom: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    if denom == 0.0 {
        return Err(Error::Degenerate("constant sequence".into()));
    }
    let tf = t as f64;
    let mut q = 0.0;
    for k in 1..=lags {
        let mut num = 0.0;
        for i in k..t {
            num += (x[i] - mean) * (x[i - k] - mean);
        }
        let rho = num / denom;
        q += rho * rho / (tf - k as f64);
    }
    q *= tf * (tf + 2.0);
    Ok((q, chi2_sf(q, lags)))
}

// --- fitting ------------------------------------------------------------

const PERSISTENCE_CAP: f64 = 1.0 - 1e-6;

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Unconstrained coordinates -> admissible parameter set. alpha0 uses a log
/// transform; (alpha1, beta1) are persistence * share with the persistence
/// capped just below 1.
fn from_unconstrained(theta: &[f64], nu: f64) -> GarchParams {
    let s = PERSISTENCE_CAP * sigmoid(theta[2]);
    let w = sigmoid(theta[3]);
    GarchParams {
        phi: theta[0].tanh(),
        alpha0: theta[1].exp(),
        alpha1: s * w,
        beta1: s * (1.0 - w),
        nu,
    }
}

fn to_unconstrained(p: &GarchParams) -> [f64; 4] {
    let s = (p.alpha1 + p.beta1).clamp(1e-8, PERSISTENCE_CAP * (1.0 - 1e-12));
    let w = (p.alpha1 / s).clamp(1e-8, 1.0 - 1e-8);
    [
        p.phi.clamp(-0.999_999, 0.999_999).atanh(),
        p.alpha0.ln(),
        logit(s / PERSISTENCE_CAP),
        logit(w),
    ]
}

/// Maximize the conditional Student-t log-likelihood over
/// (phi, alpha0, alpha1, beta1) with nu held fixed. Deterministic: a simplex
/// search from three fixed starting points, best end point kept.
pub fn fit(series: &ReturnSeries, config: &FitConfig) -> Result<FitResult> {
    if series.len() < 250 {
        return Err(Error::InvalidInput(format!(
            "fitting needs at least 250 observations, got {}",
            series.len()
        )));
    }
    if !(config.nu > 2.0) {
        return Err(Error::InvalidParams(format!(
            "nu must exceed 2, got {}",
            config.nu
        )));
    }
    let r = series.returns();
    let var = sample_variance(r);
    if var == 0.0 {
        return Err(Error::Degenerate("zero-variance series".into()));
    }

    let mut warnings = Vec::new();
    if series.len() < 1000 {
        warnings.push(format!(
            "short sample (n = {}): estimates may be unstable below 1000 observations",
            series.len()
        ));
    }

    let starts = [
        GarchParams {
            phi: 0.0,
            alpha0: 0.1 * var,
            alpha1: 0.10,
            beta1: 0.80,
            nu: config.nu,
        },
        GarchParams {
            phi: 0.0,
            alpha0: 0.4 * var,
            alpha1: 0.30,
            beta1: 0.30,
            nu: config.nu,
        },
        GarchParams {
            phi: 0.0,
            alpha0: 0.9 * var,
            alpha1: 0.05,
            beta1: 0.05,
            nu: config.nu,
        },
    ];

    let objective = |theta: &[f64]| -> f64 {
        let params = from_unconstrained(theta, config.nu);
        match loglik_sum(&params, r, var) {
            Some(ll) => -ll,
            None => f64::INFINITY,
        }
    };

    let nm = NelderMead {
        max_iterations: config.max_iterations,
        tol_rel: config.tol_rel,
        initial_step: 0.25,
    };

    let mut best: Option<crate::optim::Minimum> = None;
    for start in &starts {
        let theta0 = to_unconstrained(start);
        let min = nm.minimize(objective, &theta0);
        if min.value.is_finite() && best.as_ref().map_or(true, |b| min.value < b.value) {
            best = Some(min);
        }
    }
    let best = best.ok_or_else(|| {
        Error::FitFailed("likelihood non-finite at every starting point".into())
    })?;

    let params = from_unconstrained(&best.x, config.nu);
    let loglik = -best.value;
    if !best.converged {
        warnings.push(format!(
            "optimizer stopped at the iteration cap ({}) before meeting the tolerance",
            config.max_iterations
        ));
    }
    if params.alpha1 + params.beta1 > 1.0 - 1e-4 {
        warnings.push(format!(
            "boundary solution: alpha1 + beta1 = {:.6} is at the stationarity constraint",
            params.alpha1 + params.beta1
        ));
    }

    let robust = match robust_se(&params, series) {
        Ok(se) => Some(se),
        Err(e) => {
            warnings.push(format!("robust standard errors unavailable: {e}"));
            None
        }
    };

    Ok(FitResult {
        params,
        loglik,
        robust_se: robust,
        converged: best.converged,
        iterations: best.iterations,
        warnings,
    })
}

// --- robust standard errors ----------------------------------------------

fn se_step(x: f64) -> f64 {
    1e-4 * x.abs().max(1e-2)
}

fn with_coord(params: &GarchParams, idx: usize, value: f64) -> GarchParams {
    let mut p = *params;
    match idx {
        0 => p.phi = value,
        1 => p.alpha0 = value,
        2 => p.alpha1 = value,
        _ => p.beta1 = value,
    }
    p
}

fn coord(params: &GarchParams, idx: usize) -> f64 {
    match idx {
        0 => params.phi,
        1 => params.alpha0,
        2 => params.alpha1,
        _ => params.beta1,
    }
}

fn mean_loglik(params: &GarchParams, r: &[f64], seed: f64) -> Option<f64> {
    loglik_sum(params, r, seed).map(|s| s / (r.len() - 1) as f64)
}

/// Numerical Hessian of the mean log-likelihood, central differences.
pub(crate) fn mean_loglik_hessian(
    params: &GarchParams,
    r: &[f64],
    seed: f64,
) -> Result<[[f64; 4]; 4]> {
    let f = |p: &GarchParams| mean_loglik(p, r, seed).ok_or(Error::NonFiniteLikelihood);
    let f0 = f(params)?;
    let mut h = [[0.0; 4]; 4];
    let steps: Vec<f64> = (0..4).map(|i| se_step(coord(params, i))).collect();
    for i in 0..4 {
        let xi = coord(params, i);
        let fp = f(&with_coord(params, i, xi + steps[i]))?;
        let fm = f(&with_coord(params, i, xi - steps[i]))?;
        h[i][i] = (fp - 2.0 * f0 + fm) / (steps[i] * steps[i]);
        for j in (i + 1)..4 {
            let xj = coord(params, j);
            let pp = f(&with_coord(&with_coord(params, i, xi + steps[i]), j, xj + steps[j]))?;
            let pm = f(&with_coord(&with_coord(params, i, xi + steps[i]), j, xj - steps[j]))?;
            let mp = f(&with_coord(&with_coord(params, i, xi - steps[i]), j, xj + steps[j]))?;
            let mm = f(&with_coord(&with_coord(params, i, xi - steps[i]), j, xj - steps[j]))?;
            let v = (pp - pm - mp + mm) / (4.0 * steps[i] * steps[j]);
            h[i][j] = v;
            h[j][i] = v;
        }
    }
    Ok(h)
}

/// Mean outer product of per-observation score vectors, central differences.
pub(crate) fn mean_score_outer(
    params: &GarchParams,
    r: &[f64],
    seed: f64,
) -> Result<[[f64; 4]; 4]> {
    let m = r.len() - 1;
    let mut plus = vec![Vec::new(); 4];
    let mut minus = vec![Vec::new(); 4];
    for i in 0..4 {
        let step = se_step(coord(params, i));
        let xi = coord(params, i);
        loglik_terms(&with_coord(params, i, xi + step), r, seed, &mut plus[i])
            .ok_or(Error::NonFiniteLikelihood)?;
        loglik_terms(&with_coord(params, i, xi - step), r, seed, &mut minus[i])
            .ok_or(Error::NonFiniteLikelihood)?;
    }
    let steps: Vec<f64> = (0..4).map(|i| se_step(coord(params, i))).collect();
    let mut s = [[0.0; 4]; 4];
    for t in 0..m {
        let score: Vec<f64> = (0..4)
            .map(|i| (plus[i][t] - minus[i][t]) / (2.0 * steps[i]))
            .collect();
        for i in 0..4 {
            for j in 0..4 {
                s[i][j] += score[i] * score[j];
            }
        }
    }
    for row in &mut s {
        for v in row.iter_mut() {
            *v /= m as f64;
        }
    }
    Ok(s)
}

fn invert4(a: &[[f64; 4]; 4]) -> Option<[[f64; 4]; 4]> {
    // Gauss-Jordan with partial pivoting on an augmented [a | I] system.
    let mut aug = [[0.0f64; 8]; 4];
    for i in 0..4 {
        aug[i][..4].copy_from_slice(&a[i]);
        aug[i][4 + i] = 1.0;
    }
    for col in 0..4 {
        let pivot = (col..4).max_by(|&p, &q| {
            aug[p][col]
                .abs()
                .partial_cmp(&aug[q][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if aug[pivot][col].abs() < 1e-300 {
            return None;
        }
        aug.swap(col, pivot);
        let diag = aug[col][col];
        for v in &mut aug[col] {
            *v /= diag;
        }
        for row in 0..4 {
            if row != col {
                let factor = aug[row][col];
                for k in 0..8 {
                    aug[row][k] -= factor * aug[col][k];
                }
            }
        }
    }
    let mut inv = [[0.0; 4]; 4];
    for i in 0..4 {
        inv[i].copy_from_slice(&aug[i][4..]);
    }
    Some(inv)
}

fn mat_mul(a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut c = [[0.0; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            let aik = a[i][k];
            for j in 0..4 {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

/// Bollerslev-Wooldridge sandwich standard errors: H^{-1} S H^{-1} / m with
/// H the Hessian of the mean log-likelihood and S the mean outer product of
/// per-observation scores, both by central differences.
pub fn robust_se(params: &GarchParams, series: &ReturnSeries) -> Result<RobustSe> {
    params.validate()?;
    let r = series.returns();
    if r.len() < 10 {
        return Err(Error::InvalidInput(
            "robust standard errors need at least 10 observations".into(),
        ));
    }
    let seed = sample_variance(r);
    if seed == 0.0 {
        return Err(Error::Degenerate("zero-variance series".into()));
    }
    let h = mean_loglik_hessian(params, r, seed)?;
    let s = mean_score_outer(params, r, seed)?;
    let h_inv = invert4(&h).ok_or_else(|| Error::Singular("Hessian not invertible".into()))?;
    let cov = mat_mul(&mat_mul(&h_inv, &s), &h_inv);
    let m = (r.len() - 1) as f64;
    let mut se = [0.0; 4];
    for i in 0..4 {
        let v = cov[i][i] / m;
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::Singular(
                "sandwich covariance not positive semidefinite".into(),
            ));
        }
        se[i] = v.sqrt();
    }
    Ok(RobustSe {
        phi: se[0],
        alpha0: se[1],
        alpha1: se[2],
        beta1: se[3],
    })
}
