use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::forecast::Forecast;
use crate::optim::{Minimum, NelderMead};
use crate::series::{difference_values, integrate_forecast, TimeSeries};
use crate::simulate;

use super::kalman::{self, Innovations};
use super::params::{ar_from_free, ar_to_free, ma_boundary_closeness, ma_from_free, ma_to_free};
use super::{aic, ArimaFit, ArimaOrder};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArimaOptions {
    /// Estimate a mean; `None` means "only when d = 0".
    pub include_constant: Option<bool>,
    pub max_iter: usize,
    /// Relative change in log-likelihood across the simplex that counts as
    /// converged.
    pub rel_tol: f64,
    /// Jittered restarts tried before giving up.
    pub restarts: usize,
    /// The order search skips fits with an AR root closer to the unit circle
    /// than this modulus.
    pub min_root_modulus: f64,
}

impl Default for ArimaOptions {
    fn default() -> Self {
        Self {
            include_constant: None,
            max_iter: 2000,
            rel_tol: 1e-8,
            restarts: 3,
            min_root_modulus: 1.01,
        }
    }
}

/// Splits an optimizer vector `[u_ar.., u_ma.., μ?]` into coefficients.
struct Layout {
    p: usize,
    q: usize,
    constant: bool,
}

impl Layout {
    fn dim(&self) -> usize {
        self.p + self.q + usize::from(self.constant)
    }

    /// Optimizer vector reproducing a nested fit exactly.
    fn warm_start(&self, fit: &ArimaFit) -> Option<Vec<f64>> {
        if fit.ar_coeffs.len() > self.p
            || fit.ma_coeffs.len() > self.q
            || fit.constant_estimated != self.constant
        {
            return None;
        }
        let mut ar = fit.ar_coeffs.clone();
        ar.resize(self.p, 0.0);
        let mut ma = fit.ma_coeffs.clone();
        ma.resize(self.q, 0.0);
        let mut x = ar_to_free(&ar);
        x.extend(ma_to_free(&ma));
        if self.constant {
            x.push(fit.mean);
        }
        Some(x)
    }

    fn unpack(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
        let ar = ar_from_free(&x[..self.p]);
        let ma = ma_from_free(&x[self.p..self.p + self.q]);
        let mean = if self.constant {
            x[self.p + self.q]
        } else {
            0.0
        };
        (ar, ma, mean)
    }
}

/// Conditional sum of squares, pre-sample innovations set to zero.
fn css(w: &[f64], ar: &[f64], ma: &[f64], mean: f64) -> f64 {
    let p = ar.len();
    let mut e = vec![0.0; w.len()];
    let mut ss = 0.0;
    for t in p..w.len() {
        let mut pred = 0.0;
        for (i, phi) in ar.iter().enumerate() {
            pred += phi * (w[t - i - 1] - mean);
        }
        for (j, theta) in ma.iter().enumerate() {
            if t > j {
                pred += theta * e[t - j - 1];
            }
        }
        e[t] = w[t] - mean - pred;
        ss += e[t] * e[t];
    }
    ss
}

fn innovations(w: &[f64], ar: &[f64], ma: &[f64], mean: f64) -> Result<Innovations> {
    let centered: Vec<f64> = w.iter().map(|v| v - mean).collect();
    kalman::filter(&centered, ar, ma)
}

fn neg_loglik(w: &[f64], layout: &Layout, x: &[f64]) -> f64 {
    let (ar, ma, mean) = layout.unpack(x);
    match innovations(w, &ar, &ma, mean) {
        Ok(inn) => -kalman::concentrated(&inn).0,
        Err(_) => f64::INFINITY,
    }
}

pub fn arima_fit(train: &TimeSeries, order: ArimaOrder) -> Result<ArimaFit> {
    arima_fit_with(train, order, &ArimaOptions::default())
}

pub fn arima_fit_with(
    train: &TimeSeries,
    order: ArimaOrder,
    options: &ArimaOptions,
) -> Result<ArimaFit> {
    fit_warm(train, order, options, &[])
}

/// Like [`arima_fit_with`], additionally starting the optimizer from each
/// nested fit in `warm` (coefficients padded with zeros).
pub(crate) fn fit_warm(
    train: &TimeSeries,
    order: ArimaOrder,
    options: &ArimaOptions,
    warm: &[&ArimaFit],
) -> Result<ArimaFit> {
    let ArimaOrder { p, d, q } = order;
    let required = d + p + q + 3;
    if train.len() < required {
        return Err(Error::TooShort {
            required,
            actual: train.len(),
        });
    }
    let w = difference_values(train.values(), d)?;
    let layout = Layout {
        p,
        q,
        constant: options.include_constant.unwrap_or(d == 0),
    };

    let w_mean = w.iter().sum::<f64>() / w.len() as f64;
    let spread = (w.iter().map(|v| (v - w_mean).powi(2)).sum::<f64>() / w.len() as f64).sqrt();
    let magnitude = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let degenerate = if layout.constant {
        spread <= 1e-12 * magnitude.max(1e-300)
    } else {
        magnitude == 0.0
    };
    if degenerate {
        return degenerate_fit(train, order, &w, layout.constant.then_some(w_mean));
    }

    let mut x0 = vec![0.0; layout.dim()];
    if layout.constant {
        x0[p + q] = w_mean;
    }

    let nm = NelderMead {
        rel_tol: options.rel_tol,
        abs_tol: 1e-10,
        max_iter: options.max_iter,
        step: 0.1,
    };

    // conditional-sum-of-squares start
    let start = if layout.dim() > 0 {
        let css_obj = |x: &[f64]| {
            let (ar, ma, mean) = layout.unpack(x);
            css(&w, &ar, &ma, mean)
        };
        let m = minimize_scaled(&nm, css_obj, &x0, &layout, spread);
        if m.value.is_finite() {
            m.x
        } else {
            x0.clone()
        }
    } else {
        x0.clone()
    };

    let objective = |x: &[f64]| neg_loglik(&w, &layout, x);
    let mut best = minimize_scaled(&nm, objective, &start, &layout, spread);
    let mut converged = best.converged;
    if converged && layout.dim() > 0 {
        // a second pass from the optimum guards against a collapsed simplex
        let again = minimize_scaled(&nm, objective, &best.x, &layout, spread);
        if again.value <= best.value {
            converged = again.converged;
            best = again;
        }
    }
    for parent in warm {
        let Some(x) = layout.warm_start(parent) else {
            continue;
        };
        let m = minimize_scaled(&nm, objective, &x, &layout, spread);
        if m.value < best.value {
            converged = m.converged;
            best = m;
        }
    }
    let mut rng = simulate::rng(0x5eed ^ ((p as u64) << 16 | (d as u64) << 8 | q as u64));
    let mut attempts = 0;
    while !converged && attempts < options.restarts {
        attempts += 1;
        let jittered: Vec<f64> = best
            .x
            .iter()
            .map(|v| v + 0.1 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let m = minimize_scaled(&nm, objective, &jittered, &layout, spread);
        // a converged restart that lands no lower still certifies the best point
        converged = m.converged;
        if m.value < best.value || !best.value.is_finite() {
            best = m;
        }
    }
    if !converged || !best.value.is_finite() {
        return Err(Error::Convergence {
            restarts: attempts,
            best_loglik: -best.value,
        });
    }

    let (ar, ma, mean) = layout.unpack(&best.x);
    let inn = innovations(&w, &ar, &ma, mean)?;
    let (log_likelihood, sigma2) = kalman::concentrated(&inn);
    if sigma2.is_nan() || sigma2 <= 0.0 {
        return Err(Error::Conditioning { step: w.len() });
    }
    let residuals = inn
        .v
        .iter()
        .zip(&inn.f)
        .map(|(v, f)| v / f.sqrt())
        .collect();
    let constant = mean * (1.0 - ar.iter().sum::<f64>());
    let k = p + q + usize::from(layout.constant) + 1;
    Ok(ArimaFit {
        order,
        constant,
        mean,
        constant_estimated: layout.constant,
        ma_near_boundary: ma_boundary_closeness(&ma) > 1.0 - 1e-3,
        ar_coeffs: ar,
        ma_coeffs: ma,
        sigma2,
        log_likelihood,
        aic: aic(log_likelihood, k),
        residuals,
        last_year: train.end_year(),
    })
}

/// A differenced series with no variation: only the pure-difference model
/// (plus mean) is identifiable, and it fits exactly.
fn degenerate_fit(
    train: &TimeSeries,
    order: ArimaOrder,
    w: &[f64],
    mean: Option<f64>,
) -> Result<ArimaFit> {
    if order.p + order.q > 0 {
        return Err(Error::DegenerateVariance);
    }
    let log_likelihood = f64::INFINITY;
    let k = usize::from(mean.is_some()) + 1;
    Ok(ArimaFit {
        order,
        constant: mean.unwrap_or(0.0),
        mean: mean.unwrap_or(0.0),
        constant_estimated: mean.is_some(),
        ar_coeffs: vec![],
        ma_coeffs: vec![],
        sigma2: 0.0,
        log_likelihood,
        aic: aic(log_likelihood, k),
        residuals: vec![0.0; w.len()],
        ma_near_boundary: false,
        last_year: train.end_year(),
    })
}

/// Nelder-Mead with the mean coordinate rescaled to unit steps.
fn minimize_scaled<F: Fn(&[f64]) -> f64>(
    nm: &NelderMead,
    f: F,
    x0: &[f64],
    layout: &Layout,
    spread: f64,
) -> Minimum {
    if !layout.constant {
        return nm.minimize(f, x0);
    }
    let idx = layout.p + layout.q;
    let scale = if spread > 0.0 { spread } else { 1.0 };
    let to_inner = |x: &[f64]| {
        let mut v = x.to_vec();
        v[idx] /= scale;
        v
    };
    let to_outer = |x: &[f64]| {
        let mut v = x.to_vec();
        v[idx] *= scale;
        v
    };
    let mut m = nm.minimize(|x| f(&to_outer(x)), &to_inner(x0));
    m.x = to_outer(&m.x);
    m
}

fn check_train(fit: &ArimaFit, train: &TimeSeries) -> Result<Vec<f64>> {
    let w = difference_values(train.values(), fit.order.d)?;
    if w.len() != fit.residuals.len() || train.end_year() != fit.last_year {
        return Err(Error::InvalidArgument(
            "training series does not match the fitted model".into(),
        ));
    }
    Ok(w)
}

/// Forecasts on the original scale for the years after the training span.
pub fn arima_forecast(fit: &ArimaFit, train: &TimeSeries, horizon: usize) -> Result<Forecast> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let w = check_train(fit, train)?;
    let inn = innovations(&w, &fit.ar_coeffs, &fit.ma_coeffs, fit.mean)?;
    let diff_forecast: Vec<f64> = inn.forecast(horizon).iter().map(|v| v + fit.mean).collect();
    let values = integrate_forecast(train.values(), fit.order.d, &diff_forecast)?;
    Forecast::new(train.end_year() + 1, values, format!("ARIMA{}", fit.order))
}

/// One-step-ahead in-sample predictions on the original scale, starting at
/// the `d`-th training year.
pub fn arima_fitted(fit: &ArimaFit, train: &TimeSeries) -> Result<TimeSeries> {
    let w = check_train(fit, train)?;
    let inn = innovations(&w, &fit.ar_coeffs, &fit.ma_coeffs, fit.mean)?;
    let d = fit.order.d;
    let fitted = train.values()[d..]
        .iter()
        .zip(&inn.v)
        .map(|(y, v)| y - v)
        .collect();
    TimeSeries::new(train.start_year() + d as i32, fitted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arima::{arima_loglik, ArmaParams};

    fn ts(v: Vec<f64>) -> TimeSeries {
        TimeSeries::new(1900, v).unwrap()
    }

    #[test]
    fn css_matches_ar1_by_hand() {
        let w = [1.0, 2.0, 0.5];
        // e_1 = 2 − 0.5·1 = 1.5, e_2 = 0.5 − 0.5·2 = −0.5
        assert!((css(&w, &[0.5], &[], 0.0) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn white_noise_variance() {
        let y = simulate::normal(300, 12);
        let opts = ArimaOptions {
            include_constant: Some(false),
            ..Default::default()
        };
        let fit = arima_fit_with(&ts(y.clone()), ArimaOrder::new(0, 0, 0), &opts).unwrap();
        let ms = y.iter().map(|v| v * v).sum::<f64>() / y.len() as f64;
        assert!((fit.sigma2 - ms).abs() < 1e-6);

        let fit = arima_fit(&ts(y.clone()), ArimaOrder::new(0, 0, 0)).unwrap();
        let m = y.iter().sum::<f64>() / y.len() as f64;
        let var = y.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / y.len() as f64;
        assert!(fit.constant_estimated);
        assert!((fit.mean - m).abs() < 1e-3);
        assert!((fit.sigma2 - var).abs() < 1e-6);
    }

    #[test]
    fn aic_identity_and_residual_count() {
        let y = simulate::arima(&[0.4], 1, &[0.3], 60, 3);
        let fit = arima_fit(&ts(y), ArimaOrder::new(1, 1, 1)).unwrap();
        assert_eq!(fit.residuals.len(), 59);
        assert_eq!(fit.aic, -2.0 * fit.log_likelihood + 2.0 * 3.0);
        assert!(!fit.constant_estimated);
        assert_eq!(fit.constant, 0.0);
    }

    #[test]
    fn reported_loglik_matches_public_evaluator() {
        let y = simulate::arma(&[0.5], &[-0.3], 80, 21);
        let series = ts(y.clone());
        let fit = arima_fit(&series, ArimaOrder::new(1, 0, 1)).unwrap();
        let ll = arima_loglik(&y, &fit.params()).unwrap();
        assert!((ll - fit.log_likelihood).abs() < 1e-9);
        // σ̂² maximizes ℓ for the fitted coefficients
        for factor in [0.9, 1.1] {
            let other = ArmaParams {
                sigma2: fit.sigma2 * factor,
                ..fit.params()
            };
            assert!(arima_loglik(&y, &other).unwrap() < ll);
        }
    }

    #[test]
    fn constant_series_degenerate_path() {
        let train = ts(vec![7.5; 12]);
        let fit = arima_fit(&train, ArimaOrder::new(0, 1, 0)).unwrap();
        assert_eq!(fit.sigma2, 0.0);
        assert_eq!(fit.aic, f64::NEG_INFINITY);
        assert_eq!(arima_forecast(&fit, &train, 3).unwrap().values(), &[7.5; 3]);
        assert_eq!(
            arima_fit(&train, ArimaOrder::new(0, 1, 1)),
            Err(Error::DegenerateVariance)
        );
        let fit = arima_fit(&train, ArimaOrder::new(0, 0, 0)).unwrap();
        assert_eq!(arima_forecast(&fit, &train, 2).unwrap().values(), &[7.5; 2]);
    }

    #[test]
    fn too_short() {
        assert!(matches!(
            arima_fit(&ts(vec![1.0, 2.0, 3.0, 4.0]), ArimaOrder::new(0, 2, 2)),
            Err(Error::TooShort { .. })
        ));
    }

    #[test]
    fn zero_ma_forecast_is_linear_extrapolation() {
        let y = simulate::arima(&[], 2, &[-0.5], 30, 4);
        let train = ts(y.clone());
        let mut fit = arima_fit(&train, ArimaOrder::new(0, 2, 2)).unwrap();
        fit.ma_coeffs = vec![0.0, 0.0];
        let f = arima_forecast(&fit, &train, 4).unwrap();
        let n = y.len();
        let slope = y[n - 1] - y[n - 2];
        for (h, v) in f.values().iter().enumerate() {
            let expected = y[n - 1] + (h + 1) as f64 * slope;
            assert!((v - expected).abs() < 1e-9);
        }
        assert_eq!(f.first_year(), train.end_year() + 1);
    }

    #[test]
    fn white_noise_forecast_is_zero_on_differenced_scale() {
        let y = simulate::normal(40, 5);
        let train = ts(y);
        let opts = ArimaOptions {
            include_constant: Some(false),
            ..Default::default()
        };
        let fit = arima_fit_with(&train, ArimaOrder::new(0, 0, 0), &opts).unwrap();
        assert_eq!(arima_forecast(&fit, &train, 3).unwrap().values(), &[0.0; 3]);
    }

    #[test]
    fn forecast_prefix_is_stable() {
        let y = simulate::arima(&[0.3], 1, &[0.2], 50, 6);
        let train = ts(y);
        let fit = arima_fit(&train, ArimaOrder::new(1, 1, 1)).unwrap();
        let one = arima_forecast(&fit, &train, 1).unwrap();
        let nine = arima_forecast(&fit, &train, 9).unwrap();
        assert_eq!(one.values()[0], nine.values()[0]);
    }

    #[test]
    fn fitted_plus_innovation_is_observation() {
        let y = simulate::arima(&[], 2, &[-0.4], 30, 8);
        let train = ts(y.clone());
        let fit = arima_fit(&train, ArimaOrder::new(0, 2, 1)).unwrap();
        let fitted = arima_fitted(&fit, &train).unwrap();
        assert_eq!(fitted.len(), 28);
        assert_eq!(fitted.start_year(), 1902);
    }

    #[test]
    fn mismatched_training_series_rejected() {
        let y = simulate::arima(&[], 1, &[0.2], 30, 9);
        let train = ts(y.clone());
        let fit = arima_fit(&train, ArimaOrder::new(0, 1, 1)).unwrap();
        let other = ts(y[..25].to_vec());
        assert!(arima_forecast(&fit, &other, 2).is_err());
    }
}
