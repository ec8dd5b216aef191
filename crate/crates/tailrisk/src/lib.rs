//! Conditional tail probability and quantile risk estimation.
//!
//! The pipeline filters a return series through an AR(1)-GARCH(1,1) model
//! with Student-t innovations, estimates the downside tail of the iid
//! standardized residuals semi-parametrically (Hill estimator with a
//! small-sample regression correction), turns the tail into conditional
//! probability and quantile risk measures, and scales single-period
//! estimates to multi-period horizons with the power-law root-of-time
//! factor h^(1/alpha), benchmarked against a conditional Gaussian with
//! sqrt(h) scaling.
//!
//! See the `examples/` directory for one runnable program per capability
//! and the `cli` module for the command-line front end.

pub mod cli;
pub mod config;
pub mod data;
pub mod error;
pub mod garch;
pub mod optim;
pub mod pipeline;
pub mod report;
pub mod risk;
pub mod special;
pub mod study;
pub mod tail;

pub use error::{Error, Result};
