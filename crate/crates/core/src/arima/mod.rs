//! ARIMA(p, d, q) by exact maximum likelihood.
//!
//! The series is differenced `d` times and an ARMA(p, q) is fitted to the
//! result with the Kalman-filter likelihood. Coefficients are optimized in
//! partial-autocorrelation coordinates, so every candidate the optimizer
//! visits is stationary and invertible. A mean is estimated only when
//! `d = 0`.

mod fit;
mod kalman;
pub mod params;
mod search;

use std::fmt;

pub use fit::{arima_fit, arima_fit_with, arima_fitted, arima_forecast, ArimaOptions};
pub use search::{
    arima_order_search, arima_order_search_with, select_differencing, DifferencingChoice,
    OrderSearch, SkippedOrder,
};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArimaOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
}

impl ArimaOrder {
    pub const fn new(p: usize, d: usize, q: usize) -> Self {
        Self { p, d, q }
    }
}

impl fmt::Display for ArimaOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.p, self.d, self.q)
    }
}

/// Coefficients of a zero-differenced ARMA model,
/// `(w_t − μ) = Σ φ_i (w_{t−i} − μ) + ε_t + Σ θ_j ε_{t−j}`, `ε ~ N(0, σ²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmaParams {
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub mean: f64,
    pub sigma2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArimaFit {
    pub order: ArimaOrder,
    /// Intercept `c = μ(1 − Σφ)`; zero whenever no mean is estimated.
    pub constant: f64,
    pub mean: f64,
    pub constant_estimated: bool,
    pub ar_coeffs: Vec<f64>,
    pub ma_coeffs: Vec<f64>,
    pub sigma2: f64,
    pub log_likelihood: f64,
    pub aic: f64,
    /// Innovations on the differenced scale, standardized by the filter's
    /// prediction-variance factor; length is `n − d`.
    pub residuals: Vec<f64>,
    /// Some MA root lies within 1e-3 (in partial-autocorrelation terms) of
    /// the unit circle.
    pub ma_near_boundary: bool,
    pub last_year: i32,
}

impl ArimaFit {
    /// Estimated parameters counted by the AIC, including σ².
    pub fn n_params(&self) -> usize {
        self.order.p + self.order.q + usize::from(self.constant_estimated) + 1
    }

    /// ARMA coefficients only; the Ljung-Box degrees-of-freedom correction.
    pub fn n_arma_params(&self) -> usize {
        self.order.p + self.order.q
    }

    pub fn params(&self) -> ArmaParams {
        ArmaParams {
            ar: self.ar_coeffs.clone(),
            ma: self.ma_coeffs.clone(),
            mean: self.mean,
            sigma2: self.sigma2,
        }
    }
}

/// `−2ℓ + 2k`.
pub fn aic(log_likelihood: f64, n_params: usize) -> f64 {
    -2.0 * log_likelihood + 2.0 * n_params as f64
}

/// Exact Gaussian log-likelihood of `diff_series` under an ARMA model.
pub fn arima_loglik(diff_series: &[f64], params: &ArmaParams) -> Result<f64> {
    if params.sigma2.is_nan() || params.sigma2 <= 0.0 {
        return Err(Error::Constraint(format!(
            "innovation variance must be positive, got {}",
            params.sigma2
        )));
    }
    if diff_series.is_empty() {
        return Err(Error::EmptySeries);
    }
    let centered: Vec<f64> = diff_series.iter().map(|w| w - params.mean).collect();
    let inn = kalman::filter(&centered, &params.ar, &params.ma)?;
    Ok(kalman::log_likelihood(&inn, params.sigma2))
}
