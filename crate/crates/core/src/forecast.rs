use crate::error::{Error, Result};

/// Point forecasts for consecutive years starting at `first_year`.
#[derive(Debug, Clone, PartialEq)]
pub struct Forecast {
    first_year: i32,
    values: Vec<f64>,
    source: String,
}

impl Forecast {
    pub fn new(first_year: i32, values: Vec<f64>, source: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            first_year,
            values,
            source: source.into(),
        })
    }

    pub fn first_year(&self) -> i32 {
        self.first_year
    }

    pub fn last_year(&self) -> i32 {
        self.first_year + self.values.len() as i32 - 1
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

    /// Model identifier(s) that produced the values.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        (0..self.values.len()).map(move |i| self.first_year + i as i32)
    }
}
