//! Monte Carlo replication harness: simulate, re-fit, filter, tail-estimate,
//! and scale on each replication; backtest quantile violations on
//! non-overlapping blocks; and compute large-sample oracle targets from one
//! long simulated path.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::garch::{
    fit, filter, forecast, simulate, FitConfig, GarchParams, InnovationConvention,
};
use crate::risk::{
    conditional_probability_with_fallback, conditional_quantile_with_fallback, TailRiskModel,
    TailSide,
};
use crate::tail::{default_kappa, downside_tail, modified_hill};

/// Study design: replication count, sample size, data-generating parameters,
/// and the measure grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyConfig {
    pub n: usize,
    pub replications: usize,
    pub params: GarchParams,
    pub horizons: Vec<usize>,
    /// Quantile confidence levels, e.g. 0.95 means the 5% loss tail.
    pub quantile_levels: Vec<f64>,
    /// Loss thresholds in percent-return units.
    pub probability_thresholds: Vec<f64>,
    pub seed: u64,
    pub convention: InnovationConvention,
    /// Re-fit the model on every replication (true matches real usage);
    /// false filters with the true parameters to isolate tail-estimation error.
    pub refit: bool,
    pub burn_in: usize,
    /// Regression span for the modified Hill estimator; None uses the
    /// default floor(n/2) capped by the exceedance count.
    pub kappa: Option<usize>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            n: 2000,
            replications: 200,
            params: GarchParams {
                phi: 0.0,
                alpha0: 0.1,
                alpha1: 0.15,
                beta1: 0.8,
                nu: 4.0,
            },
            horizons: vec![1, 2, 4, 5],
            quantile_levels: vec![0.95, 0.99],
            probability_thresholds: vec![25.0, 50.0],
            seed: 20090301,
            convention: InnovationConvention::StandardizedT,
            refit: true,
            burn_in: 1000,
            kappa: None,
        }
    }
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications < 1 {
            return Err(Error::InvalidInput("need at least 1 replication".into()));
        }
        if self.n < 100 {
            return Err(Error::InvalidInput(format!(
                "study sample size must be at least 100, got {}",
                self.n
            )));
        }
        if self.horizons.is_empty() || self.horizons.iter().any(|&h| h < 1) {
            return Err(Error::InvalidInput("horizons must all be >= 1".into()));
        }
        if self
            .quantile_levels
            .iter()
            .any(|&p| !(p > 0.0 && p < 1.0))
        {
            return Err(Error::InvalidInput(
                "quantile levels must lie in (0, 1)".into(),
            ));
        }
        self.params.validate()
    }
}

/// One value per horizon for a single measure key (a quantile level or a
/// loss threshold).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureGrid {
    pub key: f64,
    pub by_horizon: Vec<f64>,
}

/// Aggregated study output: means over replications plus the violation
/// backtest, with optional oracle targets attached.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyReport {
    pub n: usize,
    pub replications: usize,
    pub horizons: Vec<usize>,
    pub convention: InnovationConvention,
    pub refit: bool,
    /// Mean conditional quantile estimates (loss magnitudes, percent).
    pub quantile_means: Vec<MeasureGrid>,
    /// Mean scaled exceedance probabilities (fractions in [0, 1]).
    pub probability_means: Vec<MeasureGrid>,
    /// Mean actual violation counts per quantile level.
    pub violation_means: Vec<MeasureGrid>,
    /// Expected violation counts floor(n/h) * (1 - level).
    pub violation_expected: Vec<MeasureGrid>,
    /// Replications dropped because some pipeline stage failed.
    pub excluded: usize,
    pub oracle_quantiles: Option<Vec<MeasureGrid>>,
    pub oracle_probabilities: Option<Vec<MeasureGrid>>,
}

/// Large-sample targets from one long path: empirical block-sum loss
/// quantiles and exceedance frequencies.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleTargets {
    pub big_n: usize,
    pub convention: InnovationConvention,
    pub horizons: Vec<usize>,
    pub quantiles: Vec<MeasureGrid>,
    pub probabilities: Vec<MeasureGrid>,
}

/// Expected number of violations for confidence `level` over floor(n/h)
/// non-overlapping h-blocks.
pub fn expected_violations(n: usize, level: f64, h: usize) -> f64 {
    (n / h) as f64 * (1.0 - level)
}

/// Count the blocks whose summed return falls below the negated loss
/// quantile; the series is split into floor(len/h) consecutive blocks.
pub fn backtest_violations(returns: &[f64], quantile_loss: f64, h: usize) -> Result<usize> {
    if h < 1 {
        return Err(Error::InvalidInput("block length must be >= 1".into()));
    }
    if returns.len() < h {
        return Err(Error::InvalidInput(format!(
            "series of {} observations has no complete block of {h}",
            returns.len()
        )));
    }
    Ok(returns
        .chunks_exact(h)
        .filter(|block| block.iter().sum::<f64>() < -quantile_loss)
        .count())
}

struct Replication {
    /// quantile value per (level index, horizon index)
    quantiles: Vec<Vec<f64>>,
    violations: Vec<Vec<usize>>,
    probabilities: Vec<Vec<f64>>,
}

fn run_replication(config: &StudyConfig, rep: u64) -> Result<Replication> {
    let series = simulate(
        &config.params,
        config.n,
        config.burn_in,
        config.seed.wrapping_add(rep),
        config.convention,
    )?;
    let params = if config.refit {
        fit(
            &series,
            &FitConfig {
                nu: config.params.nu,
                ..FitConfig::default()
            },
        )?
        .params
    } else {
        config.params
    };
    let filtered = filter(&params, &series)?;
    let sample = downside_tail(&filtered.z)?;
    let kappa = config
        .kappa
        .unwrap_or_else(|| default_kappa(&sample))
        .min(sample.len() - 1);
    let tail = modified_hill(&sample, kappa)?;
    let model = TailRiskModel::new(&sample, tail)?;
    let fc = forecast(&params, &series, &filtered);

    let mut quantiles = Vec::with_capacity(config.quantile_levels.len());
    let mut violations = Vec::with_capacity(config.quantile_levels.len());
    for &level in &config.quantile_levels {
        let mut row_q = Vec::with_capacity(config.horizons.len());
        let mut row_v = Vec::with_capacity(config.horizons.len());
        for &h in &config.horizons {
            let est =
                conditional_quantile_with_fallback(&fc, &sample, &model, 1.0 - level, h, TailSide::Lower)?;
            row_v.push(backtest_violations(series.returns(), est.value, h)?);
            row_q.push(est.value);
        }
        quantiles.push(row_q);
        violations.push(row_v);
    }

    let mut probabilities = Vec::with_capacity(config.probability_thresholds.len());
    for &threshold in &config.probability_thresholds {
        let mut row = Vec::with_capacity(config.horizons.len());
        for &h in &config.horizons {
            let est =
                conditional_probability_with_fallback(&fc, &sample, &model, threshold, h, TailSide::Lower)?;
            row.push(est.value);
        }
        probabilities.push(row);
    }

    Ok(Replication {
        quantiles,
        violations,
        probabilities,
    })
}

/// Run the full replication study. Deterministic for a fixed config:
/// replication r uses seed + r, and aggregation follows replication order
/// regardless of how the work is scheduled.
pub fn run_study(config: &StudyConfig) -> Result<StudyReport> {
    config.validate()?;

    let outcomes: Vec<Result<Replication>> = (0..config.replications as u64)
        .into_par_iter()
        .map(|rep| run_replication(config, rep))
        .collect();

    let kept: Vec<&Replication> = outcomes.iter().filter_map(|o| o.as_ref().ok()).collect();
    let excluded = config.replications - kept.len();
    if excluded * 20 > config.replications {
        return Err(Error::FitFailed(format!(
            "{excluded} of {} replications failed (over the 5% exclusion budget)",
            config.replications
        )));
    }
    if kept.is_empty() {
        return Err(Error::FitFailed("every replication failed".into()));
    }
    let count = kept.len() as f64;

    let mut quantile_means = Vec::new();
    let mut violation_means = Vec::new();
    let mut violation_expected = Vec::new();
    for (li, &level) in config.quantile_levels.iter().enumerate() {
        let mut q_row = vec![0.0; config.horizons.len()];
        let mut v_row = vec![0.0; config.horizons.len()];
        for rep in &kept {
            for (hi, _) in config.horizons.iter().enumerate() {
                q_row[hi] += rep.quantiles[li][hi];
                v_row[hi] += rep.violations[li][hi] as f64;
            }
        }
        for v in q_row.iter_mut().chain(v_row.iter_mut()) {
            *v /= count;
        }
        quantile_means.push(MeasureGrid {
            key: level,
            by_horizon: q_row,
        });
        violation_means.push(MeasureGrid {
            key: level,
            by_horizon: v_row,
        });
        violation_expected.push(MeasureGrid {
            key: level,
            by_horizon: config
                .horizons
                .iter()
                .map(|&h| expected_violations(config.n, level, h))
                .collect(),
        });
    }

    let mut probability_means = Vec::new();
    for (ti, &threshold) in config.probability_thresholds.iter().enumerate() {
        let mut row = vec![0.0; config.horizons.len()];
        for rep in &kept {
            for (hi, _) in config.horizons.iter().enumerate() {
                row[hi] += rep.probabilities[ti][hi];
            }
        }
        for v in row.iter_mut() {
            *v /= count;
        }
        probability_means.push(MeasureGrid {
            key: threshold,
            by_horizon: row,
        });
    }

    Ok(StudyReport {
        n: config.n,
        replications: config.replications,
        horizons: config.horizons.clone(),
        convention: config.convention,
        refit: config.refit,
        quantile_means,
        probability_means,
        violation_means,
        violation_expected,
        excluded,
        oracle_quantiles: None,
        oracle_probabilities: None,
    })
}

impl StudyReport {
    /// Attach oracle targets computed for the same measure grid.
    pub fn with_oracle(mut self, oracle: &OracleTargets) -> Self {
        self.oracle_quantiles = Some(oracle.quantiles.clone());
        self.oracle_probabilities = Some(oracle.probabilities.clone());
        self
    }
}

/// Ground-truth targets from one long simulated path: the empirical
/// quantiles of non-overlapping h-block loss sums and the empirical
/// exceedance frequencies at the requested thresholds.
pub fn oracle_targets(
    params: &GarchParams,
    convention: InnovationConvention,
    horizons: &[usize],
    levels: &[f64],
    thresholds: &[f64],
    big_n: usize,
    seed: u64,
) -> Result<OracleTargets> {
    if big_n < 1_000_000 {
        return Err(Error::InvalidInput(format!(
            "oracle path must have at least 1e6 observations, got {big_n}"
        )));
    }
    let series = simulate(params, big_n, 10_000, seed, convention)?;
    let r = series.returns();

    let mut quantiles: Vec<MeasureGrid> = levels
        .iter()
        .map(|&level| MeasureGrid {
            key: level,
            by_horizon: Vec::with_capacity(horizons.len()),
        })
        .collect();
    let mut probabilities: Vec<MeasureGrid> = thresholds
        .iter()
        .map(|&thr| MeasureGrid {
            key: thr,
            by_horizon: Vec::with_capacity(horizons.len()),
        })
        .collect();

    for &h in horizons {
        let mut losses: Vec<f64> = r
            .chunks_exact(h)
            .map(|block| -block.iter().sum::<f64>())
            .collect();
        for (li, &level) in levels.iter().enumerate() {
            let idx = ((losses.len() as f64 * level) as usize).min(losses.len() - 1);
            let (_, nth, _) = losses.select_nth_unstable_by(idx, |a, b| {
                a.partial_cmp(b).expect("finite losses")
            });
            quantiles[li].by_horizon.push(*nth);
        }
        for (ti, &thr) in thresholds.iter().enumerate() {
            let freq = losses.iter().filter(|&&l| l > thr).count() as f64 / losses.len() as f64;
            probabilities[ti].by_horizon.push(freq);
        }
    }

    Ok(OracleTargets {
        big_n,
        convention,
        horizons: horizons.to_vec(),
        quantiles,
        probabilities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_config() -> StudyConfig {
        StudyConfig {
            n: 500,
            replications: 4,
            seed: 99,
            ..StudyConfig::default()
        }
    }

    #[test]
    fn expected_violation_arithmetic_matches_block_counts() {
        let close = |a: f64, b: f64| (a - b).abs() < 1e-9;
        assert!(close(expected_violations(2000, 0.95, 1), 100.0));
        assert!(close(expected_violations(2000, 0.95, 2), 50.0));
        assert!(close(expected_violations(2000, 0.95, 4), 25.0));
        assert!(close(expected_violations(2000, 0.95, 5), 20.0));
        assert!(close(expected_violations(2000, 0.99, 1), 20.0));
        assert!(close(expected_violations(2000, 0.99, 5), 4.0));
    }

    #[test]
    fn backtest_counts_by_block_sum() {
        assert_eq!(backtest_violations(&[0.0; 50], 1.0, 5).unwrap(), 0);
        assert_eq!(
            backtest_violations(&[-10.0, 0.0, -10.0, 0.0], 5.0, 2).unwrap(),
            2
        );
        // trailing partial block is dropped
        assert_eq!(
            backtest_violations(&[0.0, 0.0, 0.0, 0.0, -10.0], 5.0, 2).unwrap(),
            0
        );
        assert!(backtest_violations(&[1.0], 5.0, 2).is_err());
    }

    #[test]
    fn study_deterministic_for_fixed_seed() {
        let config = quick_config();
        let a = run_study(&config).unwrap();
        let b = run_study(&config).unwrap();
        assert_eq!(a.quantile_means, b.quantile_means);
        assert_eq!(a.probability_means, b.probability_means);
        assert_eq!(a.violation_means, b.violation_means);
        assert_eq!(a.excluded, b.excluded);
    }

    #[test]
    fn study_seed_changes_output() {
        let a = run_study(&quick_config()).unwrap();
        let b = run_study(&StudyConfig {
            seed: 100,
            ..quick_config()
        })
        .unwrap();
        assert_ne!(a.quantile_means, b.quantile_means);
    }

    #[test]
    fn study_report_covers_full_grid() {
        let report = run_study(&quick_config()).unwrap();
        assert_eq!(report.quantile_means.len(), 2);
        assert_eq!(report.probability_means.len(), 2);
        for grid in report.quantile_means.iter().chain(&report.probability_means) {
            assert_eq!(grid.by_horizon.len(), 4);
            assert!(grid.by_horizon.iter().all(|v| v.is_finite() && *v >= 0.0));
        }
        for p in &report.probability_means {
            assert!(p.by_horizon.iter().all(|v| *v <= 1.0));
        }
    }

    #[test]
    fn true_parameter_mode_skips_refitting() {
        let refit = run_study(&quick_config()).unwrap();
        let fixed = run_study(&StudyConfig {
            refit: false,
            ..quick_config()
        })
        .unwrap();
        assert!(refit.refit);
        assert!(!fixed.refit);
        // same simulated paths, different filters: the reports must differ
        assert_ne!(refit.quantile_means, fixed.quantile_means);
        assert_eq!(fixed.excluded, 0);
    }

    #[test]
    fn oracle_attaches_to_report() {
        let config = quick_config();
        let report = run_study(&config).unwrap();
        assert!(report.oracle_quantiles.is_none());
        let oracle = oracle_targets(
            &config.params,
            config.convention,
            &config.horizons,
            &config.quantile_levels,
            &config.probability_thresholds,
            1_000_000,
            5,
        )
        .unwrap();
        let with = report.with_oracle(&oracle);
        let grids = with.oracle_quantiles.as_ref().unwrap();
        assert_eq!(grids.len(), 2);
        assert_eq!(grids[0].by_horizon.len(), 4);
        let rendered = crate::report::render_study_table(&with);
        assert!(rendered.contains('('), "oracle targets render in parentheses");
    }

    #[test]
    fn oracle_symmetric_process_has_zero_median() {
        let params = GarchParams::new(0.0, 0.1, 0.15, 0.8, 4.0).unwrap();
        let oracle = oracle_targets(
            &params,
            InnovationConvention::StandardizedT,
            &[1],
            &[0.5],
            &[25.0],
            1_000_000,
            7,
        )
        .unwrap();
        let median = oracle.quantiles[0].by_horizon[0];
        assert!(median.abs() < 0.02, "median loss {median} should be near 0");
    }

    #[test]
    fn oracle_converges_as_path_grows() {
        let params = GarchParams::new(0.0, 0.1, 0.15, 0.8, 4.0).unwrap();
        let small = oracle_targets(
            &params,
            InnovationConvention::StandardizedT,
            &[1, 5],
            &[0.95],
            &[],
            2_000_000,
            3,
        )
        .unwrap();
        let large = oracle_targets(
            &params,
            InnovationConvention::StandardizedT,
            &[1, 5],
            &[0.95],
            &[],
            4_000_000,
            3,
        )
        .unwrap();
        for hi in 0..2 {
            let a = small.quantiles[0].by_horizon[hi];
            let b = large.quantiles[0].by_horizon[hi];
            assert!(
                (a - b).abs() / b.abs() < 0.02,
                "doubling the path moved q95(h{hi}) from {a} to {b}"
            );
        }
    }

    #[test]
    fn oracle_rejects_short_path() {
        let params = GarchParams::new(0.0, 0.1, 0.15, 0.8, 4.0).unwrap();
        assert!(oracle_targets(
            &params,
            InnovationConvention::StandardizedT,
            &[1],
            &[0.95],
            &[],
            1000,
            7
        )
        .is_err());
    }

    #[test]
    fn raw_t_table3_parameters_diverge() {
        // with the study parameters the raw-t recursion is not strictly
        // stationary (E[ln(a1 Z^2 + b1)] > 0); long paths overflow and the
        // oracle reports the failure instead of producing targets
        let params = GarchParams::new(0.0, 0.1, 0.15, 0.8, 4.0).unwrap();
        let result = oracle_targets(
            &params,
            InnovationConvention::RawT,
            &[1],
            &[0.95],
            &[],
            5_000_000,
            7,
        );
        assert!(result.is_err(), "raw-t oracle should fail on divergence");
    }
}
