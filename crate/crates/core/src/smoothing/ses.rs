use crate::error::{Error, Result};
use crate::forecast::Forecast;
use crate::optim::golden_section;
use crate::par::{map_indices, Exec};
use crate::series::TimeSeries;

use super::argmin_cell;

/// Grid step for α; the grid is `0.001, 0.002, ..., 0.999`.
pub const SES_GRID: f64 = 0.001;
const GRID_POINTS: usize = 999;
const ALPHA_MIN: f64 = 1e-4;
const ALPHA_MAX: f64 = 1.0 - 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct SesFit {
    pub alpha: f64,
    /// Level after the last training observation.
    pub final_level: f64,
    /// One-step errors, one per training point; the first is always 0.
    pub residuals: Vec<f64>,
    pub sse: f64,
    pub last_year: i32,
}

/// Runs `l_t = α y_t + (1 − α) l_{t−1}` from `l = y_1` and returns the final
/// level with the one-step residuals `y_t − l_{t−1}`.
pub fn ses_run(values: &[f64], alpha: f64) -> (f64, Vec<f64>) {
    let mut level = values[0];
    let mut residuals = Vec::with_capacity(values.len());
    residuals.push(0.0);
    for &y in &values[1..] {
        residuals.push(y - level);
        level = alpha * y + (1.0 - alpha) * level;
    }
    (level, residuals)
}

pub fn ses_sse(values: &[f64], alpha: f64) -> f64 {
    let mut level = values[0];
    let mut sse = 0.0;
    for &y in &values[1..] {
        let e = y - level;
        sse += e * e;
        level = alpha * y + (1.0 - alpha) * level;
    }
    sse
}

fn grid_alpha(i: usize) -> f64 {
    (i + 1) as f64 / 1000.0
}

pub fn ses_fit(train: &TimeSeries) -> Result<SesFit> {
    ses_fit_with(train, Exec::default())
}

pub fn ses_fit_with(train: &TimeSeries, exec: Exec) -> Result<SesFit> {
    let y = train.values();
    if y.len() < 3 {
        return Err(Error::TooShort {
            required: 3,
            actual: y.len(),
        });
    }
    let sse = map_indices(exec, GRID_POINTS, |i| ses_sse(y, grid_alpha(i)));
    let cells: Vec<(f64, usize)> = sse.into_iter().zip(0..).collect();
    let (grid_sse, idx) = argmin_cell(&cells).expect("grid is non-empty");
    let mut alpha = grid_alpha(idx);
    let mut best = grid_sse;

    let lo = (alpha - SES_GRID).max(ALPHA_MIN);
    let hi = (alpha + SES_GRID).min(ALPHA_MAX);
    let (refined, refined_sse) = golden_section(|a| ses_sse(y, a), lo, hi, 1e-10);
    if refined_sse < best {
        alpha = refined;
        best = refined_sse;
    }

    let (final_level, residuals) = ses_run(y, alpha);
    Ok(SesFit {
        alpha,
        final_level,
        residuals,
        sse: best,
        last_year: train.end_year(),
    })
}

/// Flat forecast at the final level.
pub fn ses_forecast(fit: &SesFit, horizon: usize) -> Result<Forecast> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    Forecast::new(fit.last_year + 1, vec![fit.final_level; horizon], "SES")
}
