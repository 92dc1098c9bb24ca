use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

use super::correlogram::autocorrelations;
use super::{TestKind, TestResult};

/// `min(10, floor(n/5))`.
pub fn default_ljung_box_lags(n: usize) -> usize {
    10.min(n / 5)
}

/// Portmanteau test `Q = n(n+2) Σ r_k²/(n-k)` against χ² with
/// `lags - fitted_params` degrees of freedom.
pub fn ljung_box(residuals: &[f64], lags: usize, fitted_params: usize) -> Result<TestResult> {
    if lags <= fitted_params {
        return Err(Error::InvalidDf {
            lags,
            fitted_params,
        });
    }
    let n = residuals.len();
    if lags >= n {
        return Err(Error::TooShort {
            required: lags + 1,
            actual: n,
        });
    }
    let r = autocorrelations(residuals, lags)?;
    let nf = n as f64;
    let q = nf
        * (nf + 2.0)
        * (1..=lags)
            .map(|k| r[k] * r[k] / (nf - k as f64))
            .sum::<f64>();
    let df = lags - fitted_params;
    let chi = ChiSquared::new(df as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(TestResult::new(
        TestKind::LjungBox,
        q,
        chi.sf(q),
        None,
        lags,
        df,
    ))
}
