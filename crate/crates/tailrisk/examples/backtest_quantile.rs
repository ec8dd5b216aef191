//! Violation counting: compare a conditional loss quantile against the
//! realized non-overlapping block sums of the bundled series.
//!
//! Run with: cargo run --example backtest_quantile

use std::path::Path;

use tailrisk::config::RunConfig;
use tailrisk::data::{load_series, ColumnSpec, InputFormat};
use tailrisk::garch::{fit, FitConfig};
use tailrisk::pipeline::risk_report;
use tailrisk::study::{backtest_violations, expected_violations};

fn main() -> tailrisk::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic_returns.csv");
    let series = load_series(&data, InputFormat::Return, &ColumnSpec::default())?;
    let config = RunConfig {
        levels: vec![0.95, 0.99],
        horizons: vec![1, 2, 4, 5],
        ..RunConfig::default()
    };

    let fitted = fit(
        &series,
        &FitConfig {
            nu: config.nu,
            ..FitConfig::default()
        },
    )?;
    let report = risk_report(&series, &fitted.params, &config)?;

    println!(
        "in-sample violation backtest on {} ({} observations)",
        series.name(),
        series.len()
    );
    println!("{:>8}{:>6}{:>12}{:>10}{:>10}", "level", "h", "quantile", "actual", "expected");
    for row in &report.quantiles {
        for (hi, &h) in report.horizons.iter().enumerate() {
            let actual = backtest_violations(series.returns(), row.evt[hi], h)?;
            let expected = expected_violations(series.len(), row.key, h);
            println!(
                "{:>8}{h:>6}{:>12.4}{actual:>10}{expected:>10.1}",
                row.key, row.evt[hi]
            );
        }
    }
    println!("\na violation is a block whose summed return falls below the negated quantile");
    Ok(())
}
