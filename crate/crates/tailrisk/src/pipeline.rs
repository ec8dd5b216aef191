//! End-to-end orchestration used by the CLI and the runnable examples:
//! load, fit, filter, tail-estimate, and assemble risk reports.

use crate::config::{RunConfig, TailMethodChoice};
use crate::data::{load_series, qq_data, summary_stats, ColumnSpec, InputFormat, ReturnSeries};
use crate::error::{Error, Result};
use crate::garch::{
    filter, fit, forecast, ljung_box, FilterOutput, FitConfig, FitResult, GarchParams,
};
use crate::report::{FitReport, LjungBoxRow, RiskReport, RiskRow, TailReport};
use crate::risk::{
    conditional_probability_with_fallback, conditional_quantile_with_fallback,
    gaussian_probability, gaussian_quantile, TailRiskModel, TailSide,
};
use crate::tail::{
    default_kappa, downside_tail, hill_at_fraction, modified_hill, TailEstimate, TailSample,
};

pub fn load_input(config: &RunConfig) -> Result<ReturnSeries> {
    let path = config
        .input
        .as_deref()
        .ok_or_else(|| Error::InvalidInput("no input file given".into()))?;
    let spec = ColumnSpec {
        delimiter: config.delimiter,
        value_column: config.value_column.clone(),
        date_column: config.date_column.clone(),
    };
    let format = if config.price_input {
        InputFormat::Price
    } else {
        InputFormat::Return
    };
    load_series(path, format, &spec)
}

fn fit_config(config: &RunConfig) -> FitConfig {
    FitConfig {
        nu: config.nu,
        max_iterations: config.max_iterations,
        tol_rel: config.tol,
    }
}

/// Fit the model and assemble parameter estimates, robust standard errors,
/// and Ljung-Box diagnostics on the raw, squared, filtered, and
/// squared-filtered series at 12 lags.
pub fn fit_report(series: &ReturnSeries, config: &RunConfig) -> Result<FitReport> {
    let fitted = fit(series, &fit_config(config))?;
    diagnostics_report(series, fitted, config)
}

/// Diagnostics for an already-fitted model (for persisted-model reuse).
pub fn diagnostics_report(
    series: &ReturnSeries,
    fitted: FitResult,
    _config: &RunConfig,
) -> Result<FitReport> {
    let filtered = filter(&fitted.params, series)?;
    let r = series.returns();
    let lags = 12;
    let r2: Vec<f64> = r.iter().map(|v| v * v).collect();
    let z2: Vec<f64> = filtered.z.iter().map(|v| v * v).collect();
    let mut diagnostics = Vec::with_capacity(4);
    for (name, seq) in [
        ("R", r),
        ("R^2", &r2[..]),
        ("Z", &filtered.z[..]),
        ("Z^2", &z2[..]),
    ] {
        let (statistic, p_value) = ljung_box(seq, lags)?;
        diagnostics.push(LjungBoxRow {
            series: name.to_string(),
            statistic,
            p_value,
        });
    }
    Ok(FitReport {
        series_name: series.name().to_string(),
        n: series.len(),
        summary: summary_stats(series)?,
        fit: fitted,
        ljung_box_lags: lags,
        diagnostics,
    })
}

/// The downside tail sample of the filtered residuals plus the three
/// standard estimates (1% fraction, 5% fraction, weighted regression).
pub fn tail_report(
    series_name: &str,
    filtered: &FilterOutput,
    config: &RunConfig,
) -> Result<(TailSample, TailReport)> {
    let sample = downside_tail(&filtered.z)?;
    let kappa = config
        .kappa
        .unwrap_or_else(|| default_kappa(&sample))
        .min(sample.len() - 1);
    let mut rows = Vec::new();
    match hill_at_fraction(&sample, 0.01) {
        Ok(est) => rows.push(("fraction 1%".to_string(), est)),
        Err(e) => return Err(e),
    }
    rows.push(("fraction 5%".to_string(), hill_at_fraction(&sample, 0.05)?));
    rows.push(("huisman".to_string(), modified_hill(&sample, kappa)?));
    let report = TailReport {
        series_name: series_name.to_string(),
        n_total: sample.n_total(),
        exceedances: sample.len(),
        rows,
    };
    Ok((sample, report))
}

/// The tail estimate selected by the configured method.
pub fn select_tail(sample: &TailSample, config: &RunConfig) -> Result<TailEstimate> {
    match config.tail_method {
        TailMethodChoice::Fraction1 => hill_at_fraction(sample, 0.01),
        TailMethodChoice::Fraction5 => hill_at_fraction(sample, 0.05),
        TailMethodChoice::Huisman => {
            let kappa = config
                .kappa
                .unwrap_or_else(|| default_kappa(sample))
                .min(sample.len() - 1);
            modified_hill(sample, kappa)
        }
    }
}

/// Full conditional risk report: EVT quantile and probability rows across
/// the configured horizons, with the Gaussian benchmark when enabled.
pub fn risk_report(
    series: &ReturnSeries,
    params: &GarchParams,
    config: &RunConfig,
) -> Result<RiskReport> {
    let filtered = filter(params, series)?;
    let sample = downside_tail(&filtered.z)?;
    let tail = select_tail(&sample, config)?;
    let model = TailRiskModel::new(&sample, tail)?;
    let fc = forecast(params, series, &filtered);

    let mut quantiles = Vec::with_capacity(config.levels.len());
    for &level in &config.levels {
        let mut evt = Vec::with_capacity(config.horizons.len());
        let mut gaussian = config.benchmark.then(Vec::new);
        for &h in &config.horizons {
            evt.push(
                conditional_quantile_with_fallback(
                    &fc,
                    &sample,
                    &model,
                    1.0 - level,
                    h,
                    TailSide::Lower,
                )?
                .value,
            );
            if let Some(g) = gaussian.as_mut() {
                g.push(gaussian_quantile(&fc, level, h, TailSide::Lower)?.value);
            }
        }
        quantiles.push(RiskRow {
            key: level,
            capped: vec![false; evt.len()],
            evt,
            gaussian,
        });
    }

    let mut probabilities = Vec::with_capacity(config.thresholds.len());
    for &threshold in &config.thresholds {
        let mut evt = Vec::with_capacity(config.horizons.len());
        let mut capped = Vec::with_capacity(config.horizons.len());
        let mut gaussian = config.benchmark.then(Vec::new);
        for &h in &config.horizons {
            let est =
                conditional_probability_with_fallback(&fc, &sample, &model, threshold, h, TailSide::Lower)?;
            evt.push(est.value);
            capped.push(est.capped);
            if let Some(g) = gaussian.as_mut() {
                g.push(gaussian_probability(&fc, threshold, h, TailSide::Lower)?.value);
            }
        }
        probabilities.push(RiskRow {
            key: threshold,
            evt,
            gaussian,
            capped,
        });
    }

    Ok(RiskReport {
        series_name: series.name().to_string(),
        horizons: config.horizons.clone(),
        tail,
        forecast: fc,
        quantiles,
        probabilities,
    })
}

/// Parameters either from a persisted model file or from a fresh fit.
pub fn resolve_params(
    series: &ReturnSeries,
    model_path: Option<&std::path::Path>,
    config: &RunConfig,
) -> Result<FitResult> {
    match model_path {
        Some(path) => {
            let raw = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
            let fitted: FitResult = serde_json::from_str(&raw).map_err(|e| {
                Error::InvalidInput(format!("{} is not a model file: {e}", path.display()))
            })?;
            fitted.params.validate()?;
            Ok(fitted)
        }
        None => fit(series, &fit_config(config)),
    }
}

/// QQ pairs of the filtered residuals against the standard normal.
pub fn residual_qq(filtered: &FilterOutput) -> Result<Vec<(f64, f64)>> {
    qq_data(&filtered.z)
}
