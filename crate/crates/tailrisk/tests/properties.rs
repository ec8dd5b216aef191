//! Property tests for the invariants that hold for arbitrary (not just
//! tabulated) inputs.

use proptest::prelude::*;

use tailrisk::garch::{filter, ljung_box, simulate, GarchParams, InnovationConvention};
use tailrisk::risk::{tail_probability_std, tail_quantile_std, TailRiskModel};
use tailrisk::study::{backtest_violations, expected_violations, oracle_targets};
use tailrisk::tail::{downside_tail, hill, TailEstimate, TailMethod};

fn model(gamma: f64, m: usize, t: usize, z_threshold: f64) -> TailRiskModel {
    TailRiskModel {
        tail: TailEstimate {
            gamma,
            alpha: 1.0 / gamma,
            m,
            stderr: gamma / (m as f64).sqrt(),
            method: TailMethod::FixedFraction,
        },
        z_threshold,
        n_total: t,
    }
}

proptest! {
    #[test]
    fn hill_is_scale_invariant(
        z in prop::collection::vec(-10.0f64..10.0, 40..400),
        scale in 1e-6f64..1e6,
        m_frac in 0.05f64..0.9,
    ) {
        let down = downside_tail(&z);
        prop_assume!(down.is_ok());
        let a = down.unwrap();
        prop_assume!(a.len() >= 3);
        let m = ((a.len() - 1) as f64 * m_frac).max(1.0) as usize;
        let scaled: Vec<f64> = z.iter().map(|v| v * scale).collect();
        let b = downside_tail(&scaled).unwrap();
        match (hill(&a, m), hill(&b, m)) {
            (Ok(ea), Ok(eb)) => {
                prop_assert!((ea.gamma - eb.gamma).abs() <= 1e-12);
                prop_assert!((ea.alpha * ea.gamma - 1.0).abs() <= 1e-12);
                prop_assert!((ea.stderr - ea.gamma / (m as f64).sqrt()).abs() <= 1e-12);
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "degeneracy must not depend on scale"),
        }
    }

    #[test]
    fn probability_and_quantile_invert(
        gamma in 0.05f64..0.8,
        t in 100usize..50_000,
        m_frac in 0.01f64..0.49,
        z_threshold in 0.1f64..10.0,
        z_mult in 1.0f64..50.0,
    ) {
        let m = ((t as f64 * m_frac) as usize).max(1);
        let model = model(gamma, m, t, z_threshold);
        let z = z_threshold * z_mult;
        let p = tail_probability_std(&model, z).unwrap();
        prop_assert!(p > 0.0 && p <= model.tail_fraction() + 1e-15);
        let z_back = tail_quantile_std(&model, p).unwrap();
        prop_assert!((z_back - z).abs() / z < 1e-10);
    }

    #[test]
    fn filter_reconstructs_any_series(
        phi in -0.5f64..0.5,
        alpha0 in 0.01f64..2.0,
        alpha1 in 0.0f64..0.4,
        beta_frac in 0.0f64..0.99,
        returns in prop::collection::vec(-20.0f64..20.0, 10..200),
    ) {
        let beta1 = beta_frac * (1.0 - alpha1 - 1e-6);
        let params = GarchParams::new(phi, alpha0, alpha1, beta1, 4.0).unwrap();
        let distinct = returns.iter().any(|r| (r - returns[0]).abs() > 1e-9);
        prop_assume!(distinct);
        let series = tailrisk::data::ReturnSeries::from_returns("prop", returns).unwrap();
        let out = filter(&params, &series).unwrap();
        for t in 0..series.len() {
            prop_assert!(out.sigma[t] > 0.0);
            let rebuilt = out.mu[t] + out.sigma[t] * out.z[t];
            prop_assert!((rebuilt - series.returns()[t]).abs() <= 1e-12);
        }
    }

    #[test]
    fn ljung_box_statistic_well_formed(
        x in prop::collection::vec(-5.0f64..5.0, 30..300),
        lags in 1usize..12,
    ) {
        let distinct = x.iter().any(|v| (v - x[0]).abs() > 1e-9);
        prop_assume!(distinct);
        let (q, p) = ljung_box(&x, lags).unwrap();
        prop_assert!(q >= 0.0);
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn qq_pairs_monotone(z in prop::collection::vec(-8.0f64..8.0, 2..500)) {
        let pairs = tailrisk::data::qq_data(&z).unwrap();
        for w in pairs.windows(2) {
            prop_assert!(w[1].0 >= w[0].0);
            prop_assert!(w[1].1 >= w[0].1);
        }
    }

    #[test]
    fn backtest_count_bounded_by_blocks(
        returns in prop::collection::vec(-30.0f64..30.0, 10..400),
        quantile in 0.1f64..20.0,
        h in 1usize..8,
    ) {
        prop_assume!(returns.len() >= h);
        let count = backtest_violations(&returns, quantile, h).unwrap();
        prop_assert!(count <= returns.len() / h);
    }
}

/// True-parameter, oracle-quantile configuration: violations of the true
/// block-sum quantiles land in a (dependence-inflated) 99% band around the
/// expected counts.
#[test]
fn oracle_quantile_violations_match_expected() {
    let params = GarchParams::new(0.0, 0.1, 0.15, 0.8, 4.0).unwrap();
    let horizons = [1usize, 2, 4, 5];
    let levels = [0.95, 0.99];
    let oracle = oracle_targets(
        &params,
        InnovationConvention::StandardizedT,
        &horizons,
        &levels,
        &[],
        4_000_000,
        99,
    )
    .unwrap();

    let n = 2000;
    let reps = 150u64;
    for (li, &level) in levels.iter().enumerate() {
        for (hi, &h) in horizons.iter().enumerate() {
            let q = oracle.quantiles[li].by_horizon[hi];
            let mut total = 0usize;
            for rep in 0..reps {
                let series = simulate(
                    &params,
                    n,
                    500,
                    7_000_000 + rep,
                    InnovationConvention::StandardizedT,
                )
                .unwrap();
                total += backtest_violations(series.returns(), q, h).unwrap();
            }
            let mean = total as f64 / reps as f64;
            let expected = expected_violations(n, level, h);
            let blocks = (n / h) as f64;
            let p = 1.0 - level;
            // 99% binomial band for the mean, inflated x3 for volatility
            // clustering across blocks
            let band = 2.58 * 3.0 * (blocks * p * (1.0 - p)).sqrt() / (reps as f64).sqrt();
            assert!(
                (mean - expected).abs() <= band,
                "level {level}, h = {h}: mean {mean:.2} vs expected {expected:.2} (band {band:.2})"
            );
        }
    }
}

/// Multiplying the series by a positive constant leaves the standardized
/// residuals (and hence every tail estimate) unchanged.
#[test]
fn filtered_residuals_scale_free_end_to_end() {
    let params = GarchParams::new(0.0, 0.1, 0.15, 0.8, 4.0).unwrap();
    let series = simulate(&params, 1500, 500, 5, InnovationConvention::StandardizedT).unwrap();
    let fitted = tailrisk::garch::fit(&series, &tailrisk::garch::FitConfig::default()).unwrap();
    let scaled = tailrisk::data::ReturnSeries::from_returns(
        "scaled",
        series.returns().iter().map(|r| 100.0 * r).collect(),
    )
    .unwrap();
    let fitted_scaled =
        tailrisk::garch::fit(&scaled, &tailrisk::garch::FitConfig::default()).unwrap();

    let z_a = filter(&fitted.params, &series).unwrap().z;
    let z_b = filter(&fitted_scaled.params, &scaled).unwrap().z;
    let worst = z_a
        .iter()
        .zip(&z_b)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    assert!(
        worst < 1e-3,
        "standardized residuals should not depend on the series scale, worst gap {worst}"
    );

    let tail_a = tailrisk::tail::modified_hill(
        &downside_tail(&z_a).unwrap(),
        tailrisk::tail::default_kappa(&downside_tail(&z_a).unwrap()),
    )
    .unwrap();
    let tail_b = tailrisk::tail::modified_hill(
        &downside_tail(&z_b).unwrap(),
        tailrisk::tail::default_kappa(&downside_tail(&z_b).unwrap()),
    )
    .unwrap();
    assert!((tail_a.gamma - tail_b.gamma).abs() < 1e-3);
}
