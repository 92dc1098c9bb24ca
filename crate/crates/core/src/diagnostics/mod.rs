//! Stationarity tests, correlograms and residual tests.

mod adf;
pub mod calibration;
mod correlogram;
mod kpss;
mod ljung_box;
mod ols;
mod shapiro_wilk;

pub use adf::{adf_test, adf_test_with, default_adf_max_lag, AdfRegression, LagSelection};
pub use correlogram::{acf, autocorrelations, pacf, CorrelogramPoint};
pub use kpss::{kpss_bandwidth, kpss_test};
pub use ljung_box::{default_ljung_box_lags, ljung_box};
pub use shapiro_wilk::shapiro_wilk;

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestKind {
    Adf,
    Kpss,
    LjungBox,
    ShapiroWilk,
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestKind::Adf => "ADF",
            TestKind::Kpss => "KPSS",
            TestKind::LjungBox => "Ljung-Box",
            TestKind::ShapiroWilk => "Shapiro-Wilk",
        })
    }
}

/// Marks a p-value that is an endpoint of the tabulated range rather than an
/// interpolated value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PValueBound {
    /// True p-value is at least the reported one.
    AtLeast,
    /// True p-value is at most the reported one.
    AtMost,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub test: TestKind,
    pub statistic: f64,
    pub p_value: f64,
    pub p_bound: Option<PValueBound>,
    pub lags_used: usize,
    pub df: usize,
    pub reject_at_005: bool,
}

impl TestResult {
    pub(crate) fn new(
        test: TestKind,
        statistic: f64,
        p_value: f64,
        p_bound: Option<PValueBound>,
        lags_used: usize,
        df: usize,
    ) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        Self {
            test,
            statistic,
            p_value,
            p_bound,
            lags_used,
            df,
            reject_at_005: p_value < 0.05,
        }
    }

    /// `"0.4693"`, `">= 0.1"` or `"<= 0.01"`.
    pub fn p_display(&self) -> String {
        match self.p_bound {
            None => format!("{:.4}", self.p_value),
            Some(PValueBound::AtLeast) => format!(">= {}", self.p_value),
            Some(PValueBound::AtMost) => format!("<= {}", self.p_value),
        }
    }
}

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}
