//! Annual series, differencing and chronological splits.
//!
//! Years are labels only: every numeric routine indexes by position.

use crate::error::{Error, Result};

/// Gap-free annual observations starting at `start_year`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    start_year: i32,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(start_year: i32, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { start_year, values })
    }

    pub fn start_year(&self) -> i32 {
        self.start_year
    }

    pub fn end_year(&self) -> i32 {
        self.start_year + self.values.len() as i32 - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        (0..self.values.len()).map(move |i| self.start_year + i as i32)
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Splits into `start..=last_train_year` and the remainder.
    pub fn split_at(&self, last_train_year: i32) -> Result<(TimeSeries, TimeSeries)> {
        split_at(self, last_train_year)
    }
}

/// A series differenced `order` times, carrying what is needed to undo it.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferencedSeries {
    base_start_year: i32,
    order: usize,
    values: Vec<f64>,
    initial_values: Vec<f64>,
}

impl DifferencedSeries {
    /// Assembles a differenced series by hand, e.g. to integrate values that
    /// were produced elsewhere.
    pub fn from_parts(
        base_start_year: i32,
        order: usize,
        values: Vec<f64>,
        initial_values: Vec<f64>,
    ) -> Self {
        Self {
            base_start_year,
            order,
            values,
            initial_values,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The `order` leading observations of the original series.
    pub fn initial_values(&self) -> &[f64] {
        &self.initial_values
    }

    pub fn base_start_year(&self) -> i32 {
        self.base_start_year
    }

    /// Year of the first differenced value.
    pub fn start_year(&self) -> i32 {
        self.base_start_year + self.order as i32
    }
}

/// One pass of `y'_t = y_t - y_{t-1}`.
pub fn first_difference(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Applies first differencing `order` times.
pub fn difference_values(values: &[f64], order: usize) -> Result<Vec<f64>> {
    if values.len() <= order {
        return Err(Error::TooShort {
            required: order + 1,
            actual: values.len(),
        });
    }
    let mut out = values.to_vec();
    for _ in 0..order {
        out = first_difference(&out);
    }
    Ok(out)
}

pub fn difference(series: &TimeSeries, order: usize) -> Result<DifferencedSeries> {
    let values = difference_values(series.values(), order)?;
    Ok(DifferencedSeries {
        base_start_year: series.start_year(),
        order,
        values,
        initial_values: series.values()[..order].to_vec(),
    })
}

pub fn integrate(diff: &DifferencedSeries) -> Result<TimeSeries> {
    let d = diff.order;
    if diff.initial_values.len() != d {
        return Err(Error::Reconstruction(format!(
            "order {d} needs {d} initial values, got {}",
            diff.initial_values.len()
        )));
    }
    if d == 0 {
        return TimeSeries::new(diff.base_start_year, diff.values.clone());
    }
    // heads[k] is the first element of the k-th difference of the original
    let mut heads = Vec::with_capacity(d);
    let mut level = diff.initial_values.clone();
    for _ in 0..d {
        heads.push(level[0]);
        level = first_difference(&level);
    }
    let mut current = diff.values.clone();
    for k in (0..d).rev() {
        let mut next = Vec::with_capacity(current.len() + 1);
        let mut acc = heads[k];
        next.push(acc);
        for v in &current {
            acc += v;
            next.push(acc);
        }
        current = next;
    }
    TimeSeries::new(diff.base_start_year, current)
}

/// Maps forecasts of the `order`-th difference back to the original scale,
/// continuing from the end of `history`.
pub fn integrate_forecast(
    history: &[f64],
    order: usize,
    diff_forecast: &[f64],
) -> Result<Vec<f64>> {
    if history.len() <= order {
        return Err(Error::TooShort {
            required: order + 1,
            actual: history.len(),
        });
    }
    // tails[k] is the last element of the k-th difference of the history
    let mut tails = Vec::with_capacity(order);
    let mut level = history.to_vec();
    for _ in 0..order {
        tails.push(level[level.len() - 1]);
        level = first_difference(&level);
    }
    let mut out = Vec::with_capacity(diff_forecast.len());
    for &f in diff_forecast {
        let mut carry = f;
        for k in (0..order).rev() {
            tails[k] += carry;
            carry = tails[k];
        }
        out.push(carry);
    }
    Ok(out)
}

pub fn split_at(series: &TimeSeries, last_train_year: i32) -> Result<(TimeSeries, TimeSeries)> {
    let first = series.start_year();
    let last = series.end_year();
    if last_train_year < first || last_train_year >= last {
        return Err(Error::OutOfRange {
            year: last_train_year,
            first,
            last: last - 1,
        });
    }
    let cut = (last_train_year - first + 1) as usize;
    let train = TimeSeries::new(first, series.values()[..cut].to_vec())?;
    let test = TimeSeries::new(last_train_year + 1, series.values()[cut..].to_vec())?;
    Ok((train, test))
}
