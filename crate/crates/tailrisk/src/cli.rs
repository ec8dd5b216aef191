//! Command-line front end: fit, filter, tail, risk, simulate, study, and
//! backtest subcommands over the library pipeline.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{
    parse_convention, parse_input_format, parse_output_format, parse_tail_method, OutputFormat,
    RunConfig,
};
use crate::data::summary_stats;
use crate::error::{Error, Result};
use crate::garch::{filter, simulate, GarchParams, InnovationConvention};
use crate::pipeline;
use crate::report::{render_curve, render_qq, render_study_table};
use crate::study::{
    backtest_violations, expected_violations, oracle_targets, run_study, StudyConfig,
};
use crate::tail::hill_curve;

#[derive(Parser)]
#[command(
    name = "tailrisk",
    version,
    about = "Conditional tail risk estimation: GARCH filtering, Hill tail estimates, and power-law horizon scaling"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Configuration file (flat key = value with [section] headers)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format
    #[arg(long, value_parser = ["table", "json"])]
    format: Option<String>,
    /// Seed for anything stochastic
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct InputArgs {
    /// Input file: delimited text with a header row
    #[arg(long)]
    input: Option<PathBuf>,
    /// Whether the value column holds prices or returns
    #[arg(long, value_parser = ["price", "return"])]
    input_format: Option<String>,
    /// Header name of the value column (default: last column)
    #[arg(long)]
    value_column: Option<String>,
    /// Header name of the date column (default: a column named "date")
    #[arg(long)]
    date_column: Option<String>,
    /// Field delimiter
    #[arg(long)]
    delimiter: Option<char>,
}

#[derive(Args)]
struct TailArgs {
    /// Tail estimate used by the risk measures
    #[arg(long, value_parser = ["fraction1", "fraction5", "huisman"])]
    tail_method: Option<String>,
    /// Regression span for the huisman method (default: half the tail sample)
    #[arg(long)]
    kappa: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the AR(1)-GARCH(1,1)-t model and report diagnostics
    Fit {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        input: InputArgs,
        /// Student-t degrees of freedom (held fixed)
        #[arg(long)]
        nu: Option<f64>,
        /// Persist the fitted model as JSON
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Filter a series into standardized residuals
    Filter {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        input: InputArgs,
        /// Reuse a persisted model instead of fitting
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        nu: Option<f64>,
        /// Write date,return,mu,sigma,z rows here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write residual QQ pairs (theoretical,empirical) here
        #[arg(long)]
        qq: Option<PathBuf>,
    },
    /// Estimate the downside tail of the filtered residuals
    Tail {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        tail: TailArgs,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        nu: Option<f64>,
        /// Write the full Hill curve (m,gamma) here
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// Conditional probability and quantile risk report across horizons
    Risk {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        tail: TailArgs,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        nu: Option<f64>,
        /// Quantile confidence levels, comma separated
        #[arg(long)]
        levels: Option<String>,
        /// Loss thresholds in percent, comma separated
        #[arg(long)]
        thresholds: Option<String>,
        /// Holding periods, comma separated
        #[arg(long)]
        horizons: Option<String>,
        /// Drop the conditional-Gaussian benchmark rows
        #[arg(long)]
        no_benchmark: bool,
    },
    /// Simulate a GARCH-t return series
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        burn_in: usize,
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
        #[arg(long, default_value_t = 0.1)]
        alpha0: f64,
        #[arg(long, default_value_t = 0.15)]
        alpha1: f64,
        #[arg(long, default_value_t = 0.8)]
        beta1: f64,
        #[arg(long)]
        nu: Option<f64>,
        /// Innovation convention
        #[arg(long, value_parser = ["std-t", "raw-t"])]
        convention: Option<String>,
        /// Write the series here as date,return rows
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo replication study with the violation backtest
    Study {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        replications: Option<usize>,
        #[arg(long)]
        horizons: Option<String>,
        #[arg(long, value_parser = ["std-t", "raw-t"])]
        convention: Option<String>,
        /// Small fast preset: 2 replications of n = 500
        #[arg(long)]
        quick: bool,
        /// Filter with the true parameters instead of re-fitting
        #[arg(long)]
        true_params: bool,
        /// Attach large-sample oracle targets (one long path)
        #[arg(long)]
        with_oracle: bool,
        /// Write the report as JSON here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count quantile violations over non-overlapping blocks
    Backtest {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        input: InputArgs,
        /// Loss quantile to test, percent
        #[arg(long)]
        quantile: f64,
        /// Block length
        #[arg(long, default_value_t = 1)]
        horizon: usize,
        /// Confidence level for the expected count
        #[arg(long)]
        level: Option<f64>,
    },
}

/// Parse arguments, execute, and return the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through this path with status 0
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn resolve_config(common: &CommonArgs, input: Option<&InputArgs>) -> Result<RunConfig> {
    let mut config = RunConfig::default();
    if let Some(path) = &common.config {
        config.merge_file(path)?;
    }
    if let Some(fmt) = &common.format {
        config.format = parse_output_format(fmt)?;
    }
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(args) = input {
        if let Some(path) = &args.input {
            config.input = Some(path.clone());
        }
        if let Some(fmt) = &args.input_format {
            config.price_input = parse_input_format(fmt)?;
        }
        if let Some(c) = &args.value_column {
            config.value_column = Some(c.clone());
        }
        if let Some(c) = &args.date_column {
            config.date_column = Some(c.clone());
        }
        if let Some(d) = args.delimiter {
            config.delimiter = d;
        }
    }
    Ok(config)
}

fn parse_f64_list(raw: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("cannot parse number {v:?}")))
        })
        .collect()
}

fn parse_usize_list(raw: &str) -> Result<Vec<usize>> {
    raw.split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("cannot parse count {v:?}")))
        })
        .collect()
}

fn write_output(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit<T: serde::Serialize>(config: &RunConfig, value: &T, table: String) -> Result<()> {
    match config.format {
        OutputFormat::Table => print!("{table}"),
        OutputFormat::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(value)
                    .map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?
            );
        }
    }
    Ok(())
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Fit {
            common,
            input,
            nu,
            out,
        } => {
            let mut config = resolve_config(&common, Some(&input))?;
            if let Some(nu) = nu {
                config.nu = nu;
            }
            config.validate()?;
            let series = pipeline::load_input(&config)?;
            let report = pipeline::fit_report(&series, &config)?;
            if let Some(path) = out {
                write_output(
                    &path,
                    &serde_json::to_string_pretty(&report.fit)
                        .map_err(|e| Error::InvalidInput(e.to_string()))?,
                )?;
            }
            emit(&config, &report, report.render_table())
        }
        Command::Filter {
            common,
            input,
            model,
            nu,
            out,
            qq,
        } => {
            let mut config = resolve_config(&common, Some(&input))?;
            if let Some(nu) = nu {
                config.nu = nu;
            }
            config.validate()?;
            let series = pipeline::load_input(&config)?;
            let fitted = pipeline::resolve_params(&series, model.as_deref(), &config)?;
            let filtered = filter(&fitted.params, &series)?;
            if let Some(path) = &out {
                let mut rows = String::from("date,return,mu,sigma,z\n");
                for (i, label) in series.labels().iter().enumerate() {
                    rows.push_str(&format!(
                        "{label},{},{},{},{}\n",
                        series.returns()[i],
                        filtered.mu[i],
                        filtered.sigma[i],
                        filtered.z[i]
                    ));
                }
                write_output(path, &rows)?;
            }
            if let Some(path) = &qq {
                write_output(path, &render_qq(&pipeline::residual_qq(&filtered)?))?;
            }
            let report = pipeline::diagnostics_report(&series, fitted, &config)?;
            emit(&config, &report, report.render_table())
        }
        Command::Tail {
            common,
            input,
            tail,
            model,
            nu,
            curve,
        } => {
            let mut config = resolve_config(&common, Some(&input))?;
            if let Some(nu) = nu {
                config.nu = nu;
            }
            apply_tail_args(&mut config, &tail)?;
            config.validate()?;
            let series = pipeline::load_input(&config)?;
            let fitted = pipeline::resolve_params(&series, model.as_deref(), &config)?;
            let filtered = filter(&fitted.params, &series)?;
            let (sample, report) = pipeline::tail_report(series.name(), &filtered, &config)?;
            if let Some(path) = &curve {
                let kappa = config
                    .kappa
                    .unwrap_or_else(|| crate::tail::default_kappa(&sample))
                    .min(sample.len() - 1);
                write_output(path, &render_curve(&hill_curve(&sample, kappa)?.points))?;
            }
            emit(&config, &report, report.render_table())
        }
        Command::Risk {
            common,
            input,
            tail,
            model,
            nu,
            levels,
            thresholds,
            horizons,
            no_benchmark,
        } => {
            let mut config = resolve_config(&common, Some(&input))?;
            if let Some(nu) = nu {
                config.nu = nu;
            }
            apply_tail_args(&mut config, &tail)?;
            if let Some(raw) = &levels {
                config.levels = parse_f64_list(raw)?;
            }
            if let Some(raw) = &thresholds {
                config.thresholds = parse_f64_list(raw)?;
            }
            if let Some(raw) = &horizons {
                config.horizons = parse_usize_list(raw)?;
            }
            if no_benchmark {
                config.benchmark = false;
            }
            config.validate()?;
            let series = pipeline::load_input(&config)?;
            let fitted = pipeline::resolve_params(&series, model.as_deref(), &config)?;
            let report = pipeline::risk_report(&series, &fitted.params, &config)?;
            emit(&config, &report, report.render_table())
        }
        Command::Simulate {
            common,
            n,
            burn_in,
            phi,
            alpha0,
            alpha1,
            beta1,
            nu,
            convention,
            out,
        } => {
            let mut config = resolve_config(&common, None)?;
            if let Some(nu) = nu {
                config.nu = nu;
            }
            if let Some(raw) = &convention {
                config.convention = parse_convention(raw)?;
            }
            let params = GarchParams::new(phi, alpha0, alpha1, beta1, config.nu)?;
            let series = simulate(&params, n, burn_in, config.seed, config.convention)?;
            if let Some(path) = &out {
                series.write_csv(path)?;
            }
            let stats = summary_stats(&series)?;
            emit(
                &config,
                &stats,
                format!(
                    "simulated {} observations (seed {}): mean {:.4}  sd {:.4}  skewness {:.4}  kurtosis {:.4}\n",
                    series.len(),
                    config.seed,
                    stats.mean,
                    stats.sd,
                    stats.skewness,
                    stats.kurtosis
                ),
            )
        }
        Command::Study {
            common,
            n,
            replications,
            horizons,
            convention,
            quick,
            true_params,
            with_oracle,
            out,
        } => {
            let mut config = resolve_config(&common, None)?;
            if let Some(raw) = &convention {
                config.convention = parse_convention(raw)?;
            }
            let mut study = StudyConfig {
                seed: config.seed,
                convention: config.convention,
                refit: config.refit && !true_params,
                n: config.study_n,
                replications: config.replications,
                ..StudyConfig::default()
            };
            if quick {
                study.n = 500;
                study.replications = 2;
            }
            if let Some(n) = n {
                study.n = n;
            }
            if let Some(r) = replications {
                study.replications = r;
            }
            if let Some(raw) = &horizons {
                study.horizons = parse_usize_list(raw)?;
            }
            let mut report = run_study(&study)?;
            if with_oracle {
                let oracle = oracle_targets(
                    &study.params,
                    study.convention,
                    &study.horizons,
                    &study.quantile_levels,
                    &study.probability_thresholds,
                    10_000_000,
                    study.seed.wrapping_add(777_777),
                )?;
                report = report.with_oracle(&oracle);
            }
            if let Some(path) = &out {
                write_output(
                    path,
                    &serde_json::to_string_pretty(&report)
                        .map_err(|e| Error::InvalidInput(e.to_string()))?,
                )?;
            }
            emit(&config, &report, render_study_table(&report))
        }
        Command::Backtest {
            common,
            input,
            quantile,
            horizon,
            level,
        } => {
            let config = resolve_config(&common, Some(&input))?;
            let series = pipeline::load_input(&config)?;
            let actual = backtest_violations(series.returns(), quantile, horizon)?;
            #[derive(serde::Serialize)]
            struct BacktestReport {
                quantile: f64,
                horizon: usize,
                blocks: usize,
                actual: usize,
                expected: Option<f64>,
            }
            let report = BacktestReport {
                quantile,
                horizon,
                blocks: series.len() / horizon,
                actual,
                expected: level.map(|l| expected_violations(series.len(), l, horizon)),
            };
            let mut table = format!(
                "violations of loss quantile {quantile} over {} blocks of {horizon}: {actual}",
                report.blocks
            );
            if let Some(e) = report.expected {
                table.push_str(&format!(" (expected {e:.1})"));
            }
            table.push('\n');
            emit(&config, &report, table)
        }
    }
}

fn apply_tail_args(config: &mut RunConfig, tail: &TailArgs) -> Result<()> {
    if let Some(raw) = &tail.tail_method {
        config.tail_method = parse_tail_method(raw)?;
    }
    if let Some(k) = tail.kappa {
        config.kappa = Some(k);
    }
    Ok(())
}

/// Innovation convention label used in study output.
pub fn convention_label(convention: InnovationConvention) -> &'static str {
    match convention {
        InnovationConvention::StandardizedT => "std-t",
        InnovationConvention::RawT => "raw-t",
    }
}
