use crate::error::{Error, Result};
use crate::forecast::Forecast;
use crate::optim::NelderMead;
use crate::par::{map_indices, Exec};
use crate::series::TimeSeries;

use super::argmin_cell;

/// Grid step for α and β; each runs over `0.01, 0.02, ..., 0.99`.
pub const HDES_GRID: f64 = 0.01;
const AXIS_POINTS: usize = 99;
const PARAM_MIN: f64 = 1e-4;
const PARAM_MAX: f64 = 1.0 - 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct HdesFit {
    pub alpha: f64,
    pub beta: f64,
    pub final_level: f64,
    /// Trend after the last training observation, in units per year.
    pub final_trend: f64,
    /// One-step errors, one per training point; the first two are always 0.
    pub residuals: Vec<f64>,
    pub sse: f64,
    pub last_year: i32,
}

/// Runs the level/trend recursions from `l = y_1`, `b = y_2 − y_1`.
/// Returns `(level, trend, residuals)`.
pub fn hdes_run(values: &[f64], alpha: f64, beta: f64) -> (f64, f64, Vec<f64>) {
    let mut level = values[0];
    let mut trend = values[1] - values[0];
    let mut residuals = Vec::with_capacity(values.len());
    residuals.push(0.0);
    for &y in &values[1..] {
        let predicted = level + trend;
        residuals.push(y - predicted);
        let prev = level;
        level = alpha * y + (1.0 - alpha) * predicted;
        trend = beta * (level - prev) + (1.0 - beta) * trend;
    }
    (level, trend, residuals)
}

pub fn hdes_sse(values: &[f64], alpha: f64, beta: f64) -> f64 {
    let mut level = values[0];
    let mut trend = values[1] - values[0];
    let mut sse = 0.0;
    for &y in &values[1..] {
        let predicted = level + trend;
        let e = y - predicted;
        sse += e * e;
        let prev = level;
        level = alpha * y + (1.0 - alpha) * predicted;
        trend = beta * (level - prev) + (1.0 - beta) * trend;
    }
    sse
}

fn grid_params(cell: usize) -> (f64, f64) {
    let (i, j) = (cell / AXIS_POINTS, cell % AXIS_POINTS);
    ((i + 1) as f64 / 100.0, (j + 1) as f64 / 100.0)
}

fn clamp(v: f64) -> f64 {
    v.clamp(PARAM_MIN, PARAM_MAX)
}

pub fn hdes_fit(train: &TimeSeries) -> Result<HdesFit> {
    hdes_fit_with(train, Exec::default())
}

pub fn hdes_fit_with(train: &TimeSeries, exec: Exec) -> Result<HdesFit> {
    let y = train.values();
    if y.len() < 4 {
        return Err(Error::TooShort {
            required: 4,
            actual: y.len(),
        });
    }
    // cell = i·99 + j, so index order is α first, then β
    let sse = map_indices(exec, AXIS_POINTS * AXIS_POINTS, |cell| {
        let (a, b) = grid_params(cell);
        hdes_sse(y, a, b)
    });
    let cells: Vec<(f64, usize)> = sse.into_iter().zip(0..).collect();
    let (grid_sse, cell) = argmin_cell(&cells).expect("grid is non-empty");
    let (mut alpha, mut beta) = grid_params(cell);
    let mut best = grid_sse;

    let nm = NelderMead {
        rel_tol: 1e-12,
        abs_tol: 1e-14,
        max_iter: 2000,
        step: HDES_GRID,
    };
    let m = nm.minimize(|p| hdes_sse(y, clamp(p[0]), clamp(p[1])), &[alpha, beta]);
    let (ra, rb) = (clamp(m.x[0]), clamp(m.x[1]));
    let refined = hdes_sse(y, ra, rb);
    if refined < best {
        alpha = ra;
        beta = rb;
        best = refined;
    }

    let (final_level, final_trend, residuals) = hdes_run(y, alpha, beta);
    Ok(HdesFit {
        alpha,
        beta,
        final_level,
        final_trend,
        residuals,
        sse: best,
        last_year: train.end_year(),
    })
}

/// `l_T + h·b_T` for `h = 1..=horizon`.
pub fn hdes_forecast(fit: &HdesFit, horizon: usize) -> Result<Forecast> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let values = (1..=horizon)
        .map(|h| fit.final_level + h as f64 * fit.final_trend)
        .collect();
    Forecast::new(fit.last_year + 1, values, "HDES")
}
