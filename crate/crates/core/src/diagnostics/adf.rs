//! Augmented Dickey-Fuller unit-root test.
//!
//! ```text
//! Δy_t = α [+ β t] + γ y_{t-1} + Σ_{i=1..k} δ_i Δy_{t-i} + ε_t
//! ```
//!
//! The statistic is the t-ratio of γ̂. P-values come from MacKinnon's (1994)
//! response surface for a single series.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::series::first_difference;

use super::ols::{ols, OlsFit};
use super::{PValueBound, TestKind, TestResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdfRegression {
    #[default]
    Constant,
    ConstantTrend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LagSelection {
    Fixed(usize),
    /// Pick k in `0..=max_lag` by AIC; `None` uses [`default_adf_max_lag`].
    Aic {
        max_lag: Option<usize>,
    },
}

impl Default for LagSelection {
    fn default() -> Self {
        LagSelection::Aic { max_lag: None }
    }
}

struct Surface {
    tau_max: f64,
    tau_min: f64,
    tau_star: f64,
    small_p: [f64; 3],
    large_p: [f64; 4],
}

const SURFACE_C: Surface = Surface {
    tau_max: 2.74,
    tau_min: -18.83,
    tau_star: -1.61,
    small_p: [2.1659, 1.4412, 0.038269],
    large_p: [1.7339, 0.93202, -0.12745, -0.010368],
};

const SURFACE_CT: Surface = Surface {
    tau_max: 0.7,
    tau_min: -16.18,
    tau_star: -2.89,
    small_p: [3.2512, 1.6047, 0.049588],
    large_p: [2.5261, 0.61654, -0.37956, -0.060285],
};

fn poly(coef: &[f64], x: f64) -> f64 {
    coef.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn mackinnon_p(tau: f64, regression: AdfRegression) -> (f64, Option<PValueBound>) {
    let s = match regression {
        AdfRegression::Constant => &SURFACE_C,
        AdfRegression::ConstantTrend => &SURFACE_CT,
    };
    let surface = |t: f64| {
        let z = if t <= s.tau_star {
            poly(&s.small_p, t)
        } else {
            poly(&s.large_p, t)
        };
        Normal::standard().cdf(z)
    };
    if tau > s.tau_max {
        return (surface(s.tau_max), Some(PValueBound::AtLeast));
    }
    if tau < s.tau_min {
        return (surface(s.tau_min), Some(PValueBound::AtMost));
    }
    (surface(tau), None)
}

/// `floor(12·(n/100)^0.25)`, capped so the largest regression keeps at least
/// a few residual degrees of freedom.
pub fn default_adf_max_lag(n: usize) -> usize {
    let schwert = (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize;
    schwert.min((n / 2).saturating_sub(3))
}

fn regression_for(
    y: &[f64],
    dy: &[f64],
    lag: usize,
    first_row: usize,
    regression: AdfRegression,
) -> Option<OlsFit> {
    let mut rows = Vec::with_capacity(dy.len() - first_row);
    let mut resp = Vec::with_capacity(dy.len() - first_row);
    for t in first_row..dy.len() {
        let mut row = vec![1.0];
        if regression == AdfRegression::ConstantTrend {
            row.push((t + 1) as f64);
        }
        row.push(y[t]);
        for i in 1..=lag {
            row.push(dy[t - i]);
        }
        rows.push(row);
        resp.push(dy[t]);
    }
    ols(&rows, &resp)
}

pub fn adf_test(series: &[f64], lags: LagSelection) -> Result<TestResult> {
    adf_test_with(series, lags, AdfRegression::Constant)
}

pub fn adf_test_with(
    series: &[f64],
    lags: LagSelection,
    regression: AdfRegression,
) -> Result<TestResult> {
    let n = series.len();
    if n < 10 {
        return Err(Error::TooShort {
            required: 10,
            actual: n,
        });
    }
    let dy = first_difference(series);
    let n_det = match regression {
        AdfRegression::Constant => 1,
        AdfRegression::ConstantTrend => 2,
    };
    let max_lag = match lags {
        LagSelection::Fixed(k) => k,
        LagSelection::Aic { max_lag } => max_lag.unwrap_or_else(|| default_adf_max_lag(n)),
    };
    // rows = n - 1 - max_lag, params = n_det + 1 + max_lag
    let needed = 2 * max_lag + n_det + 3;
    if n < needed {
        return Err(Error::TooShort {
            required: needed,
            actual: n,
        });
    }
    let gamma_idx = n_det;
    let lag = match lags {
        LagSelection::Fixed(k) => k,
        LagSelection::Aic { .. } => {
            let mut best: Option<(f64, usize)> = None;
            for k in 0..=max_lag {
                let Some(fit) = regression_for(series, &dy, k, max_lag, regression) else {
                    continue;
                };
                let aic = fit.aic();
                if best.is_none_or(|(b, _)| aic < b) {
                    best = Some((aic, k));
                }
            }
            best.ok_or(Error::DegenerateVariance)?.1
        }
    };
    let fit = regression_for(series, &dy, lag, lag, regression).ok_or(Error::DegenerateVariance)?;
    let se = fit.std_err[gamma_idx];
    if se <= 0.0 || !se.is_finite() {
        return Err(Error::DegenerateVariance);
    }
    let tau = fit.coef[gamma_idx] / se;
    let (p, bound) = mackinnon_p(tau, regression);
    Ok(TestResult::new(TestKind::Adf, tau, p, bound, lag, 0))
}
