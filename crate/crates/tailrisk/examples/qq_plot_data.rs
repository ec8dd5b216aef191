//! Emit QQ data (Gaussian theoretical quantiles vs empirical quantiles of
//! the standardized residuals) for external plotting. Fat tails show up as
//! both ends of the curve pulling away from the diagonal.
//!
//! Run with: cargo run --example qq_plot_data

use std::path::Path;

use tailrisk::config::RunConfig;
use tailrisk::data::{load_series, qq_data, ColumnSpec, InputFormat};
use tailrisk::garch::{filter, fit, FitConfig};
use tailrisk::report::render_qq;

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
    let filtered = filter(&fitted.params, &series)?;
    let pairs = qq_data(&filtered.z)?;

    let out = std::env::temp_dir().join("tailrisk_qq.csv");
    std::fs::write(&out, render_qq(&pairs)).map_err(|source| tailrisk::Error::Io {
        path: out.clone(),
        source,
    })?;
    println!("wrote {} QQ pairs to {}", pairs.len(), out.display());

    println!("\ntail pairs (theoretical vs empirical):");
    for (t, e) in pairs.iter().take(3) {
        println!("  {t:>8.4}  {e:>8.4}   <- lower tail sits below the diagonal");
    }
    for (t, e) in pairs.iter().rev().take(3).collect::<Vec<_>>().into_iter().rev() {
        println!("  {t:>8.4}  {e:>8.4}   <- upper tail sits above the diagonal");
    }
    Ok(())
}
