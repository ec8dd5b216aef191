//! Filter a return series into iid standardized residuals and check the
//! exact reconstruction identity R_t = mu_t + sigma_t * z_t.
//!
//! Run with: cargo run --example filter_residuals

use std::path::Path;

use tailrisk::config::RunConfig;
use tailrisk::data::{load_series, ColumnSpec, InputFormat};
use tailrisk::garch::{filter, fit, ljung_box, FitConfig};

fn main() -> tailrisk::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic_returns.csv");
    let series = load_series(&data, InputFormat::Return, &ColumnSpec::default())?;
    let config = RunConfig::default();

    let fitted = fit(
        &series,
        &FitConfig {
            nu: config.nu,
            ..FitConfig::default()
        },
    )?;
    let out = filter(&fitted.params, &series)?;

    let worst = series
        .returns()
        .iter()
        .enumerate()
        .map(|(t, r)| (r - (out.mu[t] + out.sigma[t] * out.z[t])).abs())
        .fold(0.0f64, f64::max);
    println!("reconstruction error over {} observations: {worst:.3e}", series.len());

    let z2: Vec<f64> = out.z.iter().map(|z| z * z).collect();
    let (q, p) = ljung_box(&z2, 12)?;
    println!("Ljung-Box on squared residuals at 12 lags: Q = {q:.4}, p = {p:.4}");

    let max_sigma = out.sigma.iter().cloned().fold(f64::MIN, f64::max);
    let min_sigma = out.sigma.iter().cloned().fold(f64::MAX, f64::min);
    println!("conditional volatility range: [{min_sigma:.4}, {max_sigma:.4}] percent/day");
    Ok(())
}
