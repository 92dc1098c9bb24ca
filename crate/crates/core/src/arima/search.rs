use crate::diagnostics::{adf_test, LagSelection, TestResult};
use crate::error::{Error, Result};
use crate::par::{map_slice, Exec};
use crate::series::{difference_values, TimeSeries};

use super::fit::{fit_warm, ArimaOptions};
use super::params::min_root_modulus;
use super::{ArimaFit, ArimaOrder};

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedOrder {
    pub order: ArimaOrder,
    pub reason: String,
}

/// Candidate fits ranked by AIC (ascending; ties keep candidate order).
/// Fits with a near-unit AR root are listed under `skipped`; MA roots on
/// the unit circle are allowed and flagged on the fit.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderSearch {
    pub ranked: Vec<ArimaFit>,
    pub skipped: Vec<SkippedOrder>,
}

impl OrderSearch {
    pub fn best(&self) -> &ArimaFit {
        &self.ranked[0]
    }

    pub fn ranking(&self) -> Vec<(ArimaOrder, f64)> {
        self.ranked.iter().map(|f| (f.order, f.aic)).collect()
    }
}

pub fn arima_order_search(
    train: &TimeSeries,
    d: usize,
    p_max: usize,
    q_max: usize,
) -> Result<OrderSearch> {
    arima_order_search_with(
        train,
        d,
        p_max,
        q_max,
        &ArimaOptions::default(),
        Exec::default(),
    )
}

pub fn arima_order_search_with(
    train: &TimeSeries,
    d: usize,
    p_max: usize,
    q_max: usize,
    options: &ArimaOptions,
    exec: Exec,
) -> Result<OrderSearch> {
    if p_max > 5 || q_max > 5 || d > 5 {
        return Err(Error::InvalidArgument(format!(
            "order search limited to p, d, q <= 5 (got p_max {p_max}, d {d}, q_max {q_max})"
        )));
    }
    let candidates: Vec<ArimaOrder> = (0..=p_max)
        .flat_map(|p| (0..=q_max).map(move |q| ArimaOrder::new(p, d, q)))
        .collect();
    let index = |p: usize, q: usize| p * (q_max + 1) + q;

    // fits run in waves of equal p + q so each can start from its nested
    // parents' optima
    let mut results: Vec<Option<Result<ArimaFit>>> = vec![None; candidates.len()];
    for level in 0..=p_max + q_max {
        let wave: Vec<ArimaOrder> = candidates
            .iter()
            .copied()
            .filter(|o| o.p + o.q == level)
            .collect();
        let done = &results;
        let fitted = map_slice(exec, &wave, |&order| {
            let mut warm = Vec::new();
            if order.p > 0 {
                warm.push(index(order.p - 1, order.q));
            }
            if order.q > 0 {
                warm.push(index(order.p, order.q - 1));
            }
            let parents: Vec<&ArimaFit> = warm
                .into_iter()
                .filter_map(|i| done[i].as_ref().and_then(|r| r.as_ref().ok()))
                .collect();
            fit_warm(train, order, options, &parents)
        });
        for (order, result) in wave.into_iter().zip(fitted) {
            results[index(order.p, order.q)] = Some(result);
        }
    }
    let results = results
        .into_iter()
        .map(|r| r.expect("every candidate fitted"));

    let mut ranked = Vec::new();
    let mut skipped = Vec::new();
    for (order, result) in candidates.into_iter().zip(results) {
        match result {
            Ok(fit) => {
                let modulus = min_root_modulus(&fit.ar_coeffs);
                if modulus < options.min_root_modulus {
                    skipped.push(SkippedOrder {
                        order,
                        reason: format!(
                            "AR root modulus {modulus:.4} too close to the unit circle"
                        ),
                    });
                } else {
                    ranked.push(fit);
                }
            }
            Err(e) => skipped.push(SkippedOrder {
                order,
                reason: e.to_string(),
            }),
        }
    }
    if ranked.is_empty() {
        return Err(Error::SearchExhausted {
            skipped: skipped
                .into_iter()
                .map(|s| (s.order.to_string(), s.reason))
                .collect(),
        });
    }
    ranked.sort_by(|a, b| a.aic.total_cmp(&b.aic));
    Ok(OrderSearch { ranked, skipped })
}

/// Outcome of differencing until ADF rejects a unit root.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferencingChoice {
    pub d: usize,
    /// ADF result at each order tried, starting from the level series.
    pub adf: Vec<TestResult>,
    /// The chosen order has no variation left to test.
    pub degenerate: bool,
    /// No order up to `d_max` rejected the unit root; `d = d_max` was used.
    pub exhausted: bool,
}

/// Smallest `d ≤ d_max` whose differenced series rejects the ADF unit root at
/// 0.05. A zero-variance series counts as stationary.
pub fn select_differencing(series: &[f64], d_max: usize) -> Result<DifferencingChoice> {
    let mut adf = Vec::new();
    for d in 0..=d_max {
        let w = difference_values(series, d)?;
        match adf_test(&w, LagSelection::default()) {
            Ok(r) => {
                let reject = r.reject_at_005;
                adf.push(r);
                if reject {
                    return Ok(DifferencingChoice {
                        d,
                        adf,
                        degenerate: false,
                        exhausted: false,
                    });
                }
            }
            Err(Error::DegenerateVariance) => {
                return Ok(DifferencingChoice {
                    d,
                    adf,
                    degenerate: true,
                    exhausted: false,
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(DifferencingChoice {
        d: d_max,
        adf,
        degenerate: false,
        exhausted: true,
    })
}
