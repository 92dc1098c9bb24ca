use crate::error::{Error, Result};

use super::mean;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelogramPoint {
    pub lag: usize,
    pub value: f64,
    /// Half-width of the ±1.96/√n white-noise band.
    pub conf_bound: f64,
}

/// Sample autocorrelations `r_0 ..= r_max_lag` (so `r_0 = 1`).
pub fn autocorrelations(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = series.len();
    if max_lag >= n {
        return Err(Error::TooShort {
            required: max_lag + 1,
            actual: n,
        });
    }
    let m = mean(series);
    let dev: Vec<f64> = series.iter().map(|y| y - m).collect();
    let denom: f64 = dev.iter().map(|d| d * d).sum();
    let scale: f64 = series.iter().map(|y| y * y).sum();
    if denom <= 1e-24 * scale {
        return Err(Error::DegenerateVariance);
    }
    Ok((0..=max_lag)
        .map(|k| {
            let num: f64 = dev.iter().zip(&dev[k..]).map(|(a, b)| a * b).sum();
            num / denom
        })
        .collect())
}

pub fn acf(series: &[f64], max_lag: usize) -> Result<Vec<CorrelogramPoint>> {
    if max_lag == 0 {
        return Err(Error::InvalidArgument("max_lag must be positive".into()));
    }
    let r = autocorrelations(series, max_lag)?;
    let band = 1.96 / (series.len() as f64).sqrt();
    Ok((1..=max_lag)
        .map(|lag| CorrelogramPoint {
            lag,
            value: r[lag],
            conf_bound: band,
        })
        .collect())
}

/// Partial autocorrelations from the Durbin-Levinson recursion on the ACF.
pub fn pacf(series: &[f64], max_lag: usize) -> Result<Vec<CorrelogramPoint>> {
    if max_lag == 0 {
        return Err(Error::InvalidArgument("max_lag must be positive".into()));
    }
    let r = autocorrelations(series, max_lag)?;
    let band = 1.96 / (series.len() as f64).sqrt();
    let mut prev: Vec<f64> = Vec::with_capacity(max_lag);
    let mut out = Vec::with_capacity(max_lag);
    for k in 1..=max_lag {
        let phi_kk = if k == 1 {
            r[1]
        } else {
            let num = r[k] - (1..k).map(|j| prev[j - 1] * r[k - j]).sum::<f64>();
            let den = 1.0 - (1..k).map(|j| prev[j - 1] * r[j]).sum::<f64>();
            num / den
        };
        let mut next = Vec::with_capacity(k);
        for j in 1..k {
            next.push(prev[j - 1] - phi_kk * prev[k - j - 1]);
        }
        next.push(phi_kk);
        prev = next;
        out.push(CorrelogramPoint {
            lag: k,
            value: phi_kk,
            conf_bound: band,
        });
    }
    Ok(out)
}
