//! Run configuration: flat `key = value` text with `[section]` headers,
//! overridable by command-line flags. Unknown keys are rejected rather than
//! silently ignored.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::garch::InnovationConvention;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Json,
}

/// Which tail estimate drives the risk measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailMethodChoice {
    Fraction1,
    Fraction5,
    Huisman,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    // [input]
    pub input: Option<PathBuf>,
    pub price_input: bool,
    pub delimiter: char,
    pub value_column: Option<String>,
    pub date_column: Option<String>,
    // [model]
    pub nu: f64,
    pub max_iterations: usize,
    pub tol: f64,
    // [tail]
    pub tail_method: TailMethodChoice,
    pub kappa: Option<usize>,
    // [risk]
    pub levels: Vec<f64>,
    pub thresholds: Vec<f64>,
    pub horizons: Vec<usize>,
    pub benchmark: bool,
    // [study]
    pub study_n: usize,
    pub replications: usize,
    pub convention: InnovationConvention,
    pub refit: bool,
    // [output]
    pub format: OutputFormat,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            price_input: false,
            delimiter: ',',
            value_column: None,
            date_column: None,
            nu: 4.0,
            max_iterations: 500,
            tol: 1e-9,
            tail_method: TailMethodChoice::Huisman,
            kappa: None,
            levels: vec![0.95, 0.995],
            thresholds: vec![2.0, 5.0],
            horizons: vec![1, 2, 4, 5],
            benchmark: true,
            study_n: 2000,
            replications: 200,
            convention: InnovationConvention::StandardizedT,
            refit: true,
            format: OutputFormat::Table,
            seed: 20090301,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let mut config = Self::default();
        config.merge_file(path)?;
        Ok(config)
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<()> {
        let raw = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut section = String::new();
        for (idx, line) in raw.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') && line.ends_with(']') {
                section = line[1..line.len() - 1].trim().to_ascii_lowercase();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Malformed {
                line: idx + 1,
                msg: format!("expected `key = value`, got {line:?}"),
            })?;
            self.set(&section, key.trim(), value.trim())
                .map_err(|e| Error::Malformed {
                    line: idx + 1,
                    msg: e.to_string(),
                })?;
        }
        self.validate()
    }

    fn set(&mut self, section: &str, key: &str, value: &str) -> Result<()> {
        let unknown = || {
            Err(Error::InvalidInput(format!(
                "unknown configuration key [{section}] {key}"
            )))
        };
        match section {
            "input" => match key {
                "path" => self.input = Some(PathBuf::from(value)),
                "format" => self.price_input = parse_input_format(value)?,
                "delimiter" => {
                    let mut chars = value.chars();
                    self.delimiter = chars.next().ok_or_else(|| {
                        Error::InvalidInput("empty delimiter".into())
                    })?;
                    if chars.next().is_some() {
                        return Err(Error::InvalidInput(format!(
                            "delimiter must be one character, got {value:?}"
                        )));
                    }
                }
                "value_column" => self.value_column = Some(value.to_string()),
                "date_column" => self.date_column = Some(value.to_string()),
                _ => return unknown(),
            },
            "model" => match key {
                "nu" => self.nu = parse_num(key, value)?,
                "max_iterations" => self.max_iterations = parse_num(key, value)?,
                "tol" => self.tol = parse_num(key, value)?,
                _ => return unknown(),
            },
            "tail" => match key {
                "method" => self.tail_method = parse_tail_method(value)?,
                "kappa" => {
                    let k: usize = parse_num(key, value)?;
                    self.kappa = (k > 0).then_some(k);
                }
                _ => return unknown(),
            },
            "risk" => match key {
                "levels" => self.levels = parse_list(key, value)?,
                "thresholds" => self.thresholds = parse_list(key, value)?,
                "horizons" => self.horizons = parse_list(key, value)?,
                "benchmark" => self.benchmark = parse_bool(key, value)?,
                _ => return unknown(),
            },
            "study" => match key {
                "n" => self.study_n = parse_num(key, value)?,
                "replications" => self.replications = parse_num(key, value)?,
                "convention" => self.convention = parse_convention(value)?,
                "refit" => self.refit = parse_bool(key, value)?,
                _ => return unknown(),
            },
            "output" => match key {
                "format" => self.format = parse_output_format(value)?,
                "seed" => self.seed = parse_num(key, value)?,
                _ => return unknown(),
            },
            _ => {
                return Err(Error::InvalidInput(format!(
                    "unknown configuration section [{section}]"
                )))
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizons.iter().any(|&h| h < 1) {
            return Err(Error::InvalidInput("horizons must all be >= 1".into()));
        }
        if self.levels.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
            return Err(Error::InvalidInput(
                "quantile levels must lie in (0, 1)".into(),
            ));
        }
        if self.thresholds.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::InvalidInput(
                "loss thresholds must be positive".into(),
            ));
        }
        if !(self.nu > 2.0) {
            return Err(Error::InvalidInput(format!(
                "nu must exceed 2, got {}",
                self.nu
            )));
        }
        Ok(())
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidInput(format!("cannot parse {key} = {value:?}")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|v| parse_num(key, v.trim()))
        .collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(Error::InvalidInput(format!(
            "cannot parse {key} = {value:?} as a boolean"
        ))),
    }
}

pub fn parse_input_format(value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "price" => Ok(true),
        "return" => Ok(false),
        _ => Err(Error::InvalidInput(format!(
            "input format must be `price` or `return`, got {value:?}"
        ))),
    }
}

pub fn parse_tail_method(value: &str) -> Result<TailMethodChoice> {
    match value.to_ascii_lowercase().as_str() {
        "fraction1" => Ok(TailMethodChoice::Fraction1),
        "fraction5" => Ok(TailMethodChoice::Fraction5),
        "huisman" => Ok(TailMethodChoice::Huisman),
        _ => Err(Error::InvalidInput(format!(
            "tail method must be fraction1, fraction5, or huisman, got {value:?}"
        ))),
    }
}

pub fn parse_convention(value: &str) -> Result<InnovationConvention> {
    match value.to_ascii_lowercase().as_str() {
        "std-t" | "standardized-t" => Ok(InnovationConvention::StandardizedT),
        "raw-t" => Ok(InnovationConvention::RawT),
        _ => Err(Error::InvalidInput(format!(
            "convention must be std-t or raw-t, got {value:?}"
        ))),
    }
}

pub fn parse_output_format(value: &str) -> Result<OutputFormat> {
    match value.to_ascii_lowercase().as_str() {
        "table" => Ok(OutputFormat::Table),
        "json" => Ok(OutputFormat::Json),
        _ => Err(Error::InvalidInput(format!(
            "output format must be table or json, got {value:?}"
        ))),
    }
}
