//! Acceptance suite: one pass/fail line per criterion.
//!
//! Criterion 4's absolute reference levels are asserted exactly as stated
//! and are expected to fail: those tabulated levels are not reproducible
//! from the stated parameters (the parameters imply an unconditional
//! variance of 2, while the reported quantiles require roughly 14x that).
//! The scale-free parts of the same table (growth in h, bias ordering,
//! determinism, runtime) pass and are asserted separately.

use std::sync::OnceLock;
use std::time::Instant;

use tailrisk::config::RunConfig;
use tailrisk::data::{load_series, ColumnSpec, InputFormat};
use tailrisk::garch::{
    filter, fit, simulate, FitConfig, GarchParams, InnovationConvention,
};
use tailrisk::risk::{
    gaussian_quantile, scaling_factor, tail_probability_std, tail_quantile_std, TailRiskModel,
    TailSide,
};
use tailrisk::study::{oracle_targets, run_study, OracleTargets, StudyConfig, StudyReport};
use tailrisk::tail::{
    downside_tail, hill, hill_at_fraction, modified_hill, default_kappa, TailEstimate, TailMethod,
    TailSample,
};

fn check(label: &str, pass: bool, detail: String) {
    println!("[{}] {label}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{label}: {detail}");
}

/// Exceedance magnitudes exp(-gamma * H_{j-1}) make the Hill estimate
/// exactly `gamma` at every threshold rank.
fn exact_hill_grid(gamma: f64, n: usize) -> Vec<f64> {
    let mut values = Vec::with_capacity(n);
    let mut h = 0.0;
    for j in 0..n {
        values.push((-gamma * h).exp());
        h += 1.0 / (j + 1) as f64;
    }
    values
}

// --- criterion 1: tail standard-error identities --------------------------

#[test]
fn criterion_1_tail_standard_error_identities() {
    let cases = [(4.03f64, 37usize, 0.66f64), (3.59, 185, 0.26), (3.29, 145, 0.27)];
    let mut detail = String::new();
    let mut pass = true;
    for (gamma, m, printed) in cases {
        let sample = TailSample::from_exceedances(exact_hill_grid(gamma, m + 2), 4000).unwrap();
        let est = hill(&sample, m).unwrap();
        assert!((est.gamma - gamma).abs() < 1e-9);
        assert!((est.stderr - gamma / (m as f64).sqrt()).abs() < 1e-12);
        let rounded = (est.stderr * 100.0).round() / 100.0;
        pass &= (rounded - printed).abs() < 1e-12;
        detail.push_str(&format!("{gamma}/sqrt({m}) = {:.4} -> {rounded:.2}; ", est.stderr));
    }
    check("criterion 1 (standard-error identities)", pass, detail);
}

// --- criterion 2: multi-period scaling consistency ------------------------

#[test]
fn criterion_2_multi_period_scaling_consistency() {
    // the tail index implied by the printed five-period quantile ratio
    let alpha = 5.0f64.ln() / (3.92f64 / 2.55).ln();
    let singles = [0.68, 8.84, 2.55, 5.65];
    let multi = [
        [0.82, 0.98, 1.04],
        [10.63, 12.79, 13.58],
        [3.07, 3.69, 3.92],
        [6.79, 8.17, 8.67],
    ];
    let horizons = [2usize, 4, 5];
    let mut worst: f64 = 0.0;
    for (row, &single) in singles.iter().enumerate() {
        for (col, &h) in horizons.iter().enumerate() {
            let scaled = single * scaling_factor(h, alpha).unwrap().q;
            worst = worst.max((scaled - multi[row][col]).abs());
        }
    }
    check(
        "criterion 2 (power-law scaling reproduces multi-period cells)",
        worst <= 0.02,
        format!("alpha = {alpha:.4}, worst cell deviation {worst:.4} (tolerance 0.02)"),
    );
}

// --- criterion 3: Gaussian benchmark scaling ------------------------------

#[test]
fn criterion_3_gaussian_sqrt_h_scaling() {
    let cases = [
        (2.47f64, 2usize, 3.49f64),
        (2.47, 5, 5.52),
        (4.12, 2, 5.83),
        (4.12, 5, 9.22),
    ];
    let mut pass = true;
    let mut detail = String::new();
    for (single, h, printed) in cases {
        // calibrate the forecast so the single-period quantile is exact,
        // then let gaussian_quantile apply the sqrt(h) factor
        let level = 0.95;
        let fc = tailrisk::garch::Forecast {
            mu_next: 0.0,
            sigma_next: single / tailrisk::special::norm_inv_cdf(level),
        };
        let q1 = gaussian_quantile(&fc, level, 1, TailSide::Lower).unwrap().value;
        let qh = gaussian_quantile(&fc, level, h, TailSide::Lower).unwrap().value;
        assert!((q1 - single).abs() < 1e-12);
        pass &= (qh - printed).abs() <= 0.01;
        detail.push_str(&format!("{single}*sqrt({h}) = {qh:.4} vs {printed}; "));
    }
    check("criterion 3 (Gaussian sqrt-h scaling)", pass, detail);
}

// --- criterion 4: desk-scale replication of the simulation table ----------

struct StudyRun {
    report: StudyReport,
    oracle: OracleTargets,
    elapsed_secs: f64,
}

static STUDY: OnceLock<StudyRun> = OnceLock::new();

fn study_run() -> &'static StudyRun {
    STUDY.get_or_init(|| {
        let config = StudyConfig::default();
        let start = Instant::now();
        let report = run_study(&config).expect("default study must run");
        let elapsed_secs = start.elapsed().as_secs_f64();
        let oracle = oracle_targets(
            &config.params,
            config.convention,
            &config.horizons,
            &config.quantile_levels,
            &config.probability_thresholds,
            10_000_000,
            31_415,
        )
        .expect("oracle path must simulate");
        StudyRun {
            report,
            oracle,
            elapsed_secs,
        }
    })
}

#[test]
fn criterion_4a_mean_q95_level() {
    let run = study_run();
    let mean = run.report.quantile_means[0].by_horizon[0];
    let (lo, hi) = (7.0413 * 0.85, 7.0413 * 1.15);
    check(
        "criterion 4a (mean Q95 h=1 within 15% of 7.0413)",
        mean >= lo && mean <= hi,
        format!("mean {mean:.4}, required [{lo:.4}, {hi:.4}]"),
    );
}

#[test]
fn criterion_4b_mean_q99_level() {
    let run = study_run();
    let mean = run.report.quantile_means[1].by_horizon[0];
    let (lo, hi) = (13.0764 * 0.85, 13.0764 * 1.15);
    check(
        "criterion 4b (mean Q99 h=1 within 15% of 13.0764)",
        mean >= lo && mean <= hi,
        format!("mean {mean:.4}, required [{lo:.4}, {hi:.4}]"),
    );
}

#[test]
fn criterion_4c_violations_h1_band() {
    let run = study_run();
    let mean = run.report.violation_means[0].by_horizon[0];
    check(
        "criterion 4c (mean Q95 violations at h=1 in [90, 110])",
        (90.0..=110.0).contains(&mean),
        format!("mean violations {mean:.1}"),
    );
}

#[test]
fn criterion_4d_violations_h2_band() {
    let run = study_run();
    let mean = run.report.violation_means[0].by_horizon[1];
    check(
        "criterion 4d (mean Q95 violations at h=2 in [45, 60])",
        (45.0..=60.0).contains(&mean),
        format!("mean violations {mean:.1}"),
    );
}

#[test]
fn criterion_4e_estimates_grow_with_horizon() {
    let run = study_run();
    let mut pass = true;
    for grid in run
        .report
        .quantile_means
        .iter()
        .chain(&run.report.probability_means)
    {
        pass &= grid.by_horizon.windows(2).all(|w| w[1] > w[0]);
    }
    check(
        "criterion 4e (means strictly increase with horizon)",
        pass,
        format!(
            "Q95 row {:?}",
            run.report.quantile_means[0]
                .by_horizon
                .iter()
                .map(|v| (v * 1e4).round() / 1e4)
                .collect::<Vec<_>>()
        ),
    );
}

#[test]
fn criterion_4f_q99_bias_grows_with_horizon() {
    let run = study_run();
    let q99 = &run.report.quantile_means[1].by_horizon;
    let oracle_q99 = &run.oracle.quantiles[1].by_horizon;
    let bias: Vec<f64> = q99
        .iter()
        .zip(oracle_q99)
        .map(|(est, target)| (est - target).abs())
        .collect();
    let growing = bias.windows(2).all(|w| w[1] > w[0]);
    // most pronounced at the most extreme level: compare against Q95 at h=5
    let q95_bias_h5 =
        (run.report.quantile_means[0].by_horizon[3] - run.oracle.quantiles[0].by_horizon[3]).abs();
    let pass = growing && bias[3] > q95_bias_h5;
    check(
        "criterion 4f (Q99 bias vs oracle grows with h, largest at extreme level)",
        pass,
        format!("Q99 |bias| by horizon {bias:.4?}, Q95 |bias| at h=5: {q95_bias_h5:.4}"),
    );
}

#[test]
fn criterion_4g_runtime_and_exclusions() {
    let run = study_run();
    let pass = run.elapsed_secs < 300.0 && run.report.excluded * 20 <= run.report.replications;
    check(
        "criterion 4g (200x2000 study under 5 minutes, exclusions within budget)",
        pass,
        format!(
            "{} replications in {:.1}s, {} excluded",
            run.report.replications, run.elapsed_secs, run.report.excluded
        ),
    );
}

#[test]
fn criterion_4h_convention_selected_by_oracle() {
    // the standardized-t oracle exists; the raw-t recursion with the same
    // parameters is not strictly stationary and its long path diverges
    let params = GarchParams::new(0.0, 0.1, 0.15, 0.8, 4.0).unwrap();
    let std_ok = oracle_targets(
        &params,
        InnovationConvention::StandardizedT,
        &[1],
        &[0.95],
        &[25.0],
        2_000_000,
        7,
    )
    .is_ok();
    let raw_err = oracle_targets(
        &params,
        InnovationConvention::RawT,
        &[1],
        &[0.95],
        &[25.0],
        5_000_000,
        7,
    )
    .is_err();
    check(
        "criterion 4h (convention selected by oracle: standardized-t)",
        std_ok && raw_err,
        format!("std-t oracle ok: {std_ok}; raw-t long path diverges: {raw_err}"),
    );
}

// --- criterion 5: property suite ------------------------------------------

#[test]
fn criterion_5a_probability_quantile_inversion() {
    use rand::prelude::*;
    let mut rng = StdRng::seed_from_u64(111);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let gamma = rng.gen_range(0.05..0.75);
        let t = rng.gen_range(200..20_000);
        let m_max = ((t as f64 * 0.45) as usize).max(6);
        let m = rng.gen_range(5..m_max);
        let z_threshold = rng.gen_range(0.2..8.0);
        let model = TailRiskModel {
            tail: TailEstimate {
                gamma,
                alpha: 1.0 / gamma,
                m,
                stderr: gamma / (m as f64).sqrt(),
                method: TailMethod::FixedFraction,
            },
            z_threshold,
            n_total: t,
        };
        let z = z_threshold * rng.gen_range(1.0..20.0);
        let p = tail_probability_std(&model, z).unwrap();
        let z_back = tail_quantile_std(&model, p).unwrap();
        worst = worst.max((z_back - z).abs() / z);
        let p0 = rng.gen_range(1e-8..model.tail_fraction());
        let q = tail_quantile_std(&model, p0).unwrap();
        let p_back = tail_probability_std(&model, q).unwrap();
        worst = worst.max((p_back - p0).abs() / p0);
    }
    check(
        "criterion 5a (probability/quantile inversion, 1e4 random models)",
        worst < 1e-10,
        format!("worst relative error {worst:.3e}"),
    );
}

#[test]
fn criterion_5b_filter_reconstruction() {
    use rand::prelude::*;
    let mut rng = StdRng::seed_from_u64(222);
    let mut worst: f64 = 0.0;
    for rep in 0..50 {
        let params = GarchParams::new(
            rng.gen_range(-0.3..0.3),
            rng.gen_range(0.01..0.5),
            rng.gen_range(0.0..0.3),
            rng.gen_range(0.0..0.65),
            rng.gen_range(3.0..12.0),
        )
        .unwrap();
        let series = simulate(&params, 500, 200, 4000 + rep, InnovationConvention::StandardizedT)
            .unwrap();
        let out = filter(&params, &series).unwrap();
        for t in 0..series.len() {
            let err = (series.returns()[t] - (out.mu[t] + out.sigma[t] * out.z[t])).abs();
            worst = worst.max(err);
        }
    }
    check(
        "criterion 5b (filter reconstruction identity)",
        worst <= 1e-12,
        format!("worst absolute error {worst:.3e}"),
    );
}

#[test]
fn criterion_5c_hill_scale_invariance() {
    use rand::prelude::*;
    let mut rng = StdRng::seed_from_u64(333);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let z: Vec<f64> = (0..300).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let c = 10f64.powf(rng.gen_range(-4.0..4.0));
        let a = downside_tail(&z).unwrap();
        let b = downside_tail(&z.iter().map(|v| c * v).collect::<Vec<_>>()).unwrap();
        let m = rng.gen_range(1..a.len());
        if let (Ok(ea), Ok(eb)) = (hill(&a, m), hill(&b, m)) {
            worst = worst.max((ea.gamma - eb.gamma).abs());
        }
    }
    check(
        "criterion 5c (Hill scale invariance)",
        worst <= 1e-12,
        format!("worst gamma difference {worst:.3e}"),
    );
}

#[test]
fn criterion_5d_hill_recovery_on_pareto() {
    use rand::prelude::*;
    let mut all_pass = true;
    let mut detail = String::new();
    for (base_seed, alpha) in [(1000u64, 2.5f64), (2000, 3.0), (3000, 4.0)] {
        let mut hits_fixed = 0;
        let mut hits_huisman = 0;
        let reps = 200;
        for rep in 0..reps {
            let mut rng = StdRng::seed_from_u64(base_seed + rep);
            let n = 2000;
            let values: Vec<f64> = (0..n)
                .map(|_| (1.0 - rng.gen_range(0.0..1.0f64)).powf(-1.0 / alpha))
                .collect();
            let sample = TailSample::from_exceedances(values, 2 * n).unwrap();
            let fixed = hill_at_fraction(&sample, 0.05).unwrap();
            if (fixed.gamma - 1.0 / alpha).abs() <= 3.0 * fixed.stderr {
                hits_fixed += 1;
            }
            let huisman = modified_hill(&sample, default_kappa(&sample)).unwrap();
            if (huisman.gamma - 1.0 / alpha).abs() <= 3.0 * huisman.stderr {
                hits_huisman += 1;
            }
        }
        let frac_fixed = hits_fixed as f64 / reps as f64;
        let frac_huisman = hits_huisman as f64 / reps as f64;
        all_pass &= frac_fixed >= 0.95 && frac_huisman >= 0.95;
        detail.push_str(&format!(
            "alpha {alpha}: fixed {frac_fixed:.3}, huisman {frac_huisman:.3}; "
        ));
    }
    check("criterion 5d (Hill recovery on Pareto samples)", all_pass, detail);
}

#[test]
fn criterion_5e_sqrt_h_dominates_power_root() {
    let mut pass = true;
    for h in 2..=20usize {
        for i in 1..=40 {
            let alpha = 2.0 + (i as f64) * 0.2;
            pass &= (h as f64).sqrt() > scaling_factor(h, alpha).unwrap().q;
        }
    }
    check(
        "criterion 5e (sqrt(h) > h^(1/alpha) over the grid)",
        pass,
        "h in 2..=20, alpha in (2, 10]".into(),
    );
}

#[test]
fn criterion_5f_mle_recovery_bands() {
    let truth = GarchParams::new(0.0, 0.1, 0.15, 0.8, 4.0).unwrap();
    let start = Instant::now();
    let mut hits = 0;
    let reps = 50;
    for rep in 0..reps {
        let series = simulate(
            &truth,
            2000,
            1000,
            90_000 + rep,
            InnovationConvention::StandardizedT,
        )
        .unwrap();
        let fitted = fit(&series, &FitConfig::default()).unwrap();
        let a1 = fitted.params.alpha1;
        let b1 = fitted.params.beta1;
        if (0.08..=0.22).contains(&a1) && (0.70..=0.90).contains(&b1) {
            hits += 1;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    check(
        "criterion 5f (MLE recovery bands on simulated data)",
        hits >= 45 && elapsed < 120.0,
        format!("{hits}/{reps} replications in band, {elapsed:.1}s"),
    );
}

#[test]
fn criterion_5g_ljung_box_size_on_white_noise() {
    use rand::prelude::*;
    use tailrisk::garch::ljung_box;
    let reps = 400;
    let mut rejections = 0;
    let mut p_sum = 0.0;
    for rep in 0..reps {
        let mut rng = StdRng::seed_from_u64(50_000 + rep);
        let x: Vec<f64> = (0..1000)
            .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        let (_, p) = ljung_box(&x, 12).unwrap();
        if p < 0.05 {
            rejections += 1;
        }
        p_sum += p;
    }
    let rate = rejections as f64 / reps as f64;
    let mean_p = p_sum / reps as f64;
    check(
        "criterion 5g (Ljung-Box 5% size on white noise)",
        (0.02..=0.09).contains(&rate) && (0.45..=0.55).contains(&mean_p),
        format!("rejection rate {rate:.3}, mean p {mean_p:.3}"),
    );
}

// --- criterion 6: bundled synthetic pipeline smoke ------------------------

#[test]
fn criterion_6_bundled_pipeline_smoke() {
    let data = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic_returns.csv");
    let series = load_series(&data, InputFormat::Return, &ColumnSpec::default()).unwrap();
    assert!(series.len() >= 3000, "bundled series should be ~3700 observations");

    let config = RunConfig::default();
    let report_a = tailrisk::pipeline::fit_report(&series, &config).unwrap();
    let report_b = tailrisk::pipeline::fit_report(&series, &config).unwrap();
    assert_eq!(
        serde_json::to_string(&report_a).unwrap(),
        serde_json::to_string(&report_b).unwrap(),
        "pipeline must be deterministic"
    );

    let risk = tailrisk::pipeline::risk_report(&series, &report_a.fit.params, &config).unwrap();
    let evt = &risk.quantiles[1];
    let gauss = evt.gaussian.as_ref().unwrap();
    let pass = report_a.fit.converged
        && evt.evt[0] > gauss[0]
        && risk.probabilities.iter().all(|row| {
            row.evt.iter().all(|v| (0.0..=1.0).contains(v))
        });
    check(
        "criterion 6 (bundled synthetic end-to-end smoke)",
        pass,
        format!(
            "converged fit, far-tail EVT {:.4} > Gaussian {:.4}, probabilities in [0, 1]",
            evt.evt[0], gauss[0]
        ),
    );
}
