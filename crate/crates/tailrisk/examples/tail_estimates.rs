//! Estimate the downside tail index of the filtered residuals three ways:
//! Hill at the 1% and 5% thresholds and the bias-corrected weighted
//! regression, plus a look at the raw Hill curve.
//!
//! Run with: cargo run --example tail_estimates

use std::path::Path;

use tailrisk::config::RunConfig;
use tailrisk::data::{load_series, ColumnSpec, InputFormat};
use tailrisk::garch::{filter, fit, FitConfig};
use tailrisk::pipeline::tail_report;
use tailrisk::tail::{default_kappa, hill_curve};

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
    let (sample, report) = tail_report(series.name(), &filtered, &config)?;
    print!("{}", report.render_table());

    // a slice of the Hill curve: the instability at small m is why the
    // regression correction exists
    let curve = hill_curve(&sample, default_kappa(&sample))?;
    println!("\nHill curve (every 50th threshold):");
    println!("{:>6}{:>10}{:>10}", "m", "gamma", "alpha");
    for (m, g) in curve.points.iter().step_by(50) {
        println!("{m:>6}{g:>10.4}{:>10.4}", 1.0 / g);
    }
    Ok(())
}
