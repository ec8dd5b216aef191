//! Report structures shared by the CLI and the examples: the same numbers
//! render as aligned text tables (4 decimal places) or serialize as JSON
//! records at full precision.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::data::SummaryStats;
use crate::garch::{FitResult, Forecast};
use crate::study::StudyReport;
use crate::tail::TailEstimate;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LjungBoxRow {
    pub series: String,
    pub statistic: f64,
    pub p_value: f64,
}

/// Fitted-model diagnostics: parameters with robust standard errors plus
/// serial-correlation tests on raw, squared, filtered, and squared-filtered
/// series.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub series_name: String,
    pub n: usize,
    pub fit: FitResult,
    pub summary: SummaryStats,
    pub ljung_box_lags: usize,
    pub diagnostics: Vec<LjungBoxRow>,
}

impl FitReport {
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let p = &self.fit.params;
        writeln!(
            out,
            "AR(1)-GARCH(1,1) with standardized t({:.0}) innovations on {} (n = {})",
            p.nu, self.series_name, self.n
        )
        .unwrap();
        writeln!(
            out,
            "log-likelihood {:.4}, {} after {} iterations",
            self.fit.loglik,
            if self.fit.converged { "converged" } else { "NOT converged" },
            self.fit.iterations
        )
        .unwrap();
        writeln!(
            out,
            "sample: mean {:.4}  sd {:.4}  skewness {:.4}  kurtosis {:.4}",
            self.summary.mean, self.summary.sd, self.summary.skewness, self.summary.kurtosis
        )
        .unwrap();
        writeln!(out).unwrap();
        writeln!(
            out,
            "{:<12}{:>10}{:>10}{:>10}{:>10}",
            "", "phi", "alpha0", "alpha1", "beta1"
        )
        .unwrap();
        writeln!(
            out,
            "{:<12}{:>10.4}{:>10.4}{:>10.4}{:>10.4}",
            "estimate", p.phi, p.alpha0, p.alpha1, p.beta1
        )
        .unwrap();
        if let Some(se) = &self.fit.robust_se {
            writeln!(
                out,
                "{:<12}{:>10}{:>10}{:>10}{:>10}",
                "robust se",
                format!("({:.4})", se.phi),
                format!("({:.4})", se.alpha0),
                format!("({:.4})", se.alpha1),
                format!("({:.4})", se.beta1)
            )
            .unwrap();
        }
        writeln!(out).unwrap();
        writeln!(
            out,
            "Ljung-Box ({} lags){:>14}{:>10}",
            self.ljung_box_lags, "Q", "p"
        )
        .unwrap();
        for row in &self.diagnostics {
            writeln!(
                out,
                "{:<20}{:>12.4}{:>10.4}",
                row.series, row.statistic, row.p_value
            )
            .unwrap();
        }
        for w in &self.fit.warnings {
            writeln!(out, "warning: {w}").unwrap();
        }
        out
    }
}

/// Tail estimates at the standard thresholds plus the bias-corrected
/// regression estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailReport {
    pub series_name: String,
    pub n_total: usize,
    pub exceedances: usize,
    pub rows: Vec<(String, TailEstimate)>,
}

impl TailReport {
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "Downside tail of standardized residuals: {} exceedances of n = {}",
            self.exceedances, self.n_total
        )
        .unwrap();
        writeln!(
            out,
            "{:<14}{:>6}{:>10}{:>10}{:>10}",
            "method", "m", "gamma", "alpha", "stderr"
        )
        .unwrap();
        for (label, est) in &self.rows {
            writeln!(
                out,
                "{:<14}{:>6}{:>10.4}{:>10.4}{:>10}",
                label,
                est.m,
                est.gamma,
                est.alpha,
                format!("({:.4})", est.stderr)
            )
            .unwrap();
        }
        out
    }
}

/// One measure row across horizons; Gaussian benchmark values sit in
/// parentheses under the corresponding cells in table mode.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RiskRow {
    pub key: f64,
    pub evt: Vec<f64>,
    pub gaussian: Option<Vec<f64>>,
    pub capped: Vec<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RiskReport {
    pub series_name: String,
    pub horizons: Vec<usize>,
    pub tail: TailEstimate,
    pub forecast: Forecast,
    /// Quantile rows keyed by confidence level (e.g. 0.95).
    pub quantiles: Vec<RiskRow>,
    /// Probability rows keyed by the loss threshold in percent.
    pub probabilities: Vec<RiskRow>,
}

impl RiskReport {
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "Conditional risk for {}: mu_next {:.4}, sigma_next {:.4}, tail alpha {:.4} (m = {})",
            self.series_name, self.forecast.mu_next, self.forecast.sigma_next, self.tail.alpha, self.tail.m
        )
        .unwrap();
        write!(out, "{:<12}", "measure").unwrap();
        for h in &self.horizons {
            write!(out, "{:>12}", format!("h = {h}")).unwrap();
        }
        writeln!(out).unwrap();

        for row in &self.probabilities {
            write!(out, "{:<12}", format!("P{} %", trim_key(row.key))).unwrap();
            for (i, v) in row.evt.iter().enumerate() {
                let mark = if row.capped[i] { "*" } else { "" };
                write!(out, "{:>12}", format!("{:.4}{mark}", 100.0 * v)).unwrap();
            }
            writeln!(out).unwrap();
            if let Some(g) = &row.gaussian {
                write!(out, "{:<12}", "").unwrap();
                for v in g {
                    write!(out, "{:>12}", format!("({:.4})", 100.0 * v)).unwrap();
                }
                writeln!(out).unwrap();
            }
        }
        for row in &self.quantiles {
            write!(out, "{:<12}", format!("Q{} %", trim_key(100.0 * row.key))).unwrap();
            for v in &row.evt {
                write!(out, "{:>12}", format!("{v:.4}")).unwrap();
            }
            writeln!(out).unwrap();
            if let Some(g) = &row.gaussian {
                write!(out, "{:<12}", "").unwrap();
                for v in g {
                    write!(out, "{:>12}", format!("({v:.4})")).unwrap();
                }
                writeln!(out).unwrap();
            }
        }
        if self
            .probabilities
            .iter()
            .any(|r| r.capped.iter().any(|c| *c))
        {
            writeln!(out, "* scaled probability capped at 1").unwrap();
        }
        out
    }
}

fn trim_key(key: f64) -> String {
    let s = format!("{key}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Render the replication-study report in the rows-by-horizons layout, with
/// oracle targets (when attached) and expected violation counts in
/// parentheses.
pub fn render_study_table(report: &StudyReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "Replication study: {} replications of n = {} ({:?}, {}), {} excluded",
        report.replications,
        report.n,
        report.convention,
        if report.refit { "re-fit per replication" } else { "true parameters" },
        report.excluded
    )
    .unwrap();
    write!(out, "{:<12}", "measure").unwrap();
    for h in &report.horizons {
        write!(out, "{:>20}", format!("h = {h}")).unwrap();
    }
    writeln!(out).unwrap();

    for (ti, row) in report.probability_means.iter().enumerate() {
        write!(out, "{:<12}", format!("P{} %", trim_key(row.key))).unwrap();
        for (hi, v) in row.by_horizon.iter().enumerate() {
            let cell = match &report.oracle_probabilities {
                Some(oracle) => format!(
                    "{:.4} ({:.4})",
                    100.0 * v,
                    100.0 * oracle[ti].by_horizon[hi]
                ),
                None => format!("{:.4}", 100.0 * v),
            };
            write!(out, "{cell:>20}").unwrap();
        }
        writeln!(out).unwrap();
    }
    for (li, row) in report.quantile_means.iter().enumerate() {
        write!(out, "{:<12}", format!("Q{} %", trim_key(100.0 * row.key))).unwrap();
        for (hi, v) in row.by_horizon.iter().enumerate() {
            let cell = match &report.oracle_quantiles {
                Some(oracle) => format!("{:.4} ({:.4})", v, oracle[li].by_horizon[hi]),
                None => format!("{v:.4}"),
            };
            write!(out, "{cell:>20}").unwrap();
        }
        writeln!(out).unwrap();
    }
    writeln!(out, "violations (expected)").unwrap();
    for (row, expected) in report
        .violation_means
        .iter()
        .zip(&report.violation_expected)
    {
        write!(out, "{:<12}", format!("Q{} %", trim_key(100.0 * row.key))).unwrap();
        for (v, e) in row.by_horizon.iter().zip(&expected.by_horizon) {
            write!(out, "{:>20}", format!("{v:.1} ({})", e.round())).unwrap();
        }
        writeln!(out).unwrap();
    }
    out
}

/// Two-column delimited text for external plotting.
pub fn render_curve(points: &[(usize, f64)]) -> String {
    let mut out = String::from("m,gamma\n");
    for (m, g) in points {
        writeln!(out, "{m},{g}").unwrap();
    }
    out
}

/// QQ pairs as delimited text.
pub fn render_qq(pairs: &[(f64, f64)]) -> String {
    let mut out = String::from("theoretical,empirical\n");
    for (t, e) in pairs {
        writeln!(out, "{t},{e}").unwrap();
    }
    out
}
