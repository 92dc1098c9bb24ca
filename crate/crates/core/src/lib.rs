//! Annual time-series forecasting: simple and double (Holt) exponential
//! smoothing, exact-likelihood ARIMA, an equal-weight Holt/ARIMA combination,
//! and the diagnostics used to pick and check those models (ADF, KPSS,
//! ACF/PACF, Ljung-Box, Shapiro-Wilk).
//!
//! Grid searches, ARIMA order searches and Monte-Carlo calibration runs fan
//! out over rayon when the `parallel` feature is on (the default). Every
//! reduction is ordered, so results do not depend on the thread count.

pub mod arima;
pub mod diagnostics;
pub mod ensemble;
mod error;
pub mod forecast;
pub mod optim;
pub mod par;
pub mod series;
pub mod simulate;
pub mod smoothing;

pub use error::{Error, Result};
pub use forecast::Forecast;
pub use par::Exec;
pub use series::{DifferencedSeries, TimeSeries};
