//! Return-series ingestion, summary statistics, and diagnostic data
//! (time-series and QQ pairs) for reporting.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::special::norm_inv_cdf;

/// Ordered sequence of dated returns, in percent units (log returns x 100).
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    name: String,
    labels: Vec<String>,
    returns: Vec<f64>,
}

/// Whether an input file holds price levels or ready-made percent returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Price,
    Return,
}

/// How to locate the value (and optional date) column in a delimited file.
#[derive(Debug, Clone)]
pub struct ColumnSpec {
    pub delimiter: char,
    /// Header name of the value column; defaults to the last column.
    pub value_column: Option<String>,
    /// Header name of the date column; defaults to a column named "date".
    pub date_column: Option<String>,
}

impl Default for ColumnSpec {
    fn default() -> Self {
        Self {
            delimiter: ',',
            value_column: None,
            date_column: None,
        }
    }
}

impl ReturnSeries {
    /// Build a series from labelled returns, enforcing the input invariants:
    /// finite values, unique labels, and strictly increasing dates whenever
    /// every label parses as an ISO date.
    pub fn from_observations(
        name: impl Into<String>,
        observations: Vec<(String, f64)>,
    ) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::InvalidInput("empty return series".into()));
        }
        let (labels, returns): (Vec<String>, Vec<f64>) = observations.into_iter().unzip();
        for (i, r) in returns.iter().enumerate() {
            if !r.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "non-finite return at observation {} ({})",
                    i + 1,
                    labels[i]
                )));
            }
        }
        {
            let mut seen = std::collections::HashSet::with_capacity(labels.len());
            for l in &labels {
                if !seen.insert(l.as_str()) {
                    return Err(Error::InvalidInput(format!("duplicate date label {l:?}")));
                }
            }
        }
        if labels.iter().all(|l| parse_iso_date(l).is_some()) {
            for w in labels.windows(2) {
                if parse_iso_date(&w[1]) <= parse_iso_date(&w[0]) {
                    return Err(Error::InvalidInput(format!(
                        "dates not strictly increasing: {:?} then {:?}",
                        w[0], w[1]
                    )));
                }
            }
        }
        Ok(Self {
            name: name.into(),
            labels,
            returns,
        })
    }

    /// Convenience constructor with synthetic labels t000001, t000002, ...
    pub fn from_returns(name: impl Into<String>, returns: Vec<f64>) -> Result<Self> {
        let observations = returns
            .into_iter()
            .enumerate()
            .map(|(i, r)| (format!("t{:06}", i + 1), r))
            .collect();
        Self::from_observations(name, observations)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn returns(&self) -> &[f64] {
        &self.returns
    }

    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }

    /// Compound percent log returns back into a price path starting at
    /// `initial`; the first element is `initial` itself.
    pub fn to_prices(&self, initial: f64) -> Vec<f64> {
        let mut prices = Vec::with_capacity(self.len() + 1);
        let mut log_p = initial.ln();
        prices.push(initial);
        for r in &self.returns {
            log_p += r / 100.0;
            prices.push(log_p.exp());
        }
        prices
    }

    /// Write the series as delimited text with a header row.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("date,return\n");
        for (l, r) in self.labels.iter().zip(&self.returns) {
            writeln!(out, "{l},{r}").expect("string write");
        }
        std::fs::write(path, out).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Load a return series from a delimited text file with a header row.
/// Price inputs are converted to percent log returns 100 * ln(P_t / P_{t-1}).
pub fn load_series(path: &Path, format: InputFormat, spec: &ColumnSpec) -> Result<ReturnSeries> {
    let raw = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut lines = raw
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::InvalidInput(format!("{}: empty file", path.display())))?;
    let columns: Vec<&str> = header.split(spec.delimiter).map(str::trim).collect();

    let value_idx = match &spec.value_column {
        Some(name) => find_column(&columns, name)?,
        None => columns.len() - 1,
    };
    let date_idx = match &spec.date_column {
        Some(name) => Some(find_column(&columns, name)?),
        None => columns
            .iter()
            .position(|c| c.eq_ignore_ascii_case("date"))
            .filter(|&i| i != value_idx),
    };

    let mut observations: Vec<(String, f64)> = Vec::new();
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split(spec.delimiter).map(str::trim).collect();
        let cell = fields.get(value_idx).copied().ok_or_else(|| Error::Malformed {
            line: line_no + 1,
            msg: format!("missing column {}", value_idx + 1),
        })?;
        let value: f64 = cell.parse().map_err(|_| Error::Malformed {
            line: line_no + 1,
            msg: format!("non-numeric cell {cell:?}"),
        })?;
        if !value.is_finite() {
            return Err(Error::Malformed {
                line: line_no + 1,
                msg: format!("non-finite value {cell:?}"),
            });
        }
        if format == InputFormat::Price && value <= 0.0 {
            return Err(Error::Malformed {
                line: line_no + 1,
                msg: format!("non-positive price {value}"),
            });
        }
        let label = match date_idx {
            Some(i) => fields
                .get(i)
                .copied()
                .ok_or_else(|| Error::Malformed {
                    line: line_no + 1,
                    msg: format!("missing column {}", i + 1),
                })?
                .to_string(),
            None => format!("t{:06}", observations.len() + 1),
        };
        observations.push((label, value));
    }

    if observations.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "{}: need at least 2 data rows, got {}",
            path.display(),
            observations.len()
        )));
    }

    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "series".to_string());

    match format {
        InputFormat::Return => ReturnSeries::from_observations(name, observations),
        InputFormat::Price => {
            let returns = observations
                .windows(2)
                .map(|w| {
                    let (_, p_prev) = &w[0];
                    let (label, p) = &w[1];
                    (label.clone(), 100.0 * (p / p_prev).ln())
                })
                .collect();
            ReturnSeries::from_observations(name, returns)
        }
    }
}

fn find_column(columns: &[&str], name: &str) -> Result<usize> {
    columns
        .iter()
        .position(|c| c.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::InvalidInput(format!("no column named {name:?} in header")))
}

fn parse_iso_date(s: &str) -> Option<(u16, u8, u8)> {
    let b = s.as_bytes();
    if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
        return None;
    }
    let y: u16 = s[0..4].parse().ok()?;
    let m: u8 = s[5..7].parse().ok()?;
    let d: u8 = s[8..10].parse().ok()?;
    if (1..=12).contains(&m) && (1..=31).contains(&d) {
        Some((y, m, d))
    } else {
        None
    }
}

/// Sample moments under the population (1/n) convention; kurtosis is the
/// plain fourth-moment ratio, not excess.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

pub fn summary_stats(series: &ReturnSeries) -> Result<SummaryStats> {
    let x = series.returns();
    let n = x.len();
    if n < 4 {
        return Err(Error::InvalidInput(format!(
            "summary statistics need n >= 4, got {n}"
        )));
    }
    let nf = n as f64;
    let mean = x.iter().sum::<f64>() / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in x {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    if m2 == 0.0 {
        return Err(Error::Degenerate(
            "constant series: skewness and kurtosis undefined".into(),
        ));
    }
    let sd = m2.sqrt();
    Ok(SummaryStats {
        n,
        mean,
        sd,
        skewness: m3 / (sd * sd * sd),
        kurtosis: m4 / (m2 * m2),
    })
}

/// Pairs of (theoretical Gaussian quantile, empirical quantile) for a QQ
/// plot, using plotting positions (i - 0.5)/n; both coordinates ascend.
pub fn qq_data(z: &[f64]) -> Result<Vec<(f64, f64)>> {
    if z.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "QQ data needs n >= 2, got {}",
            z.len()
        )));
    }
    let mut sorted = z.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite residuals"));
    let n = sorted.len() as f64;
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(i, empirical)| {
            let p = (i as f64 + 0.5) / n;
            (norm_inv_cdf(p), empirical)
        })
        .collect())
}
