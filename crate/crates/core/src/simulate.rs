//! Seeded generators for synthetic series used in calibration and recovery
//! checks. One seed gives one independent ChaCha stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| r.sample(StandardNormal)).collect()
}

pub fn exponential(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| r.sample(Exp1)).collect()
}

/// Cumulative sum of standard-normal steps.
pub fn random_walk(n: usize, seed: u64) -> Vec<f64> {
    let mut acc = 0.0;
    normal(n, seed)
        .into_iter()
        .map(|e| {
            acc += e;
            acc
        })
        .collect()
}

/// ARMA(p, q) with unit-variance shocks,
/// `x_t = Σ φ_i x_{t-i} + e_t + Σ θ_j e_{t-j}`, after a burn-in.
pub fn arma(ar: &[f64], ma: &[f64], n: usize, seed: u64) -> Vec<f64> {
    let burn = 500;
    let total = n + burn;
    let shocks = normal(total, seed);
    let mut x = vec![0.0; total];
    for t in 0..total {
        let mut v = shocks[t];
        for (i, phi) in ar.iter().enumerate() {
            if t > i {
                v += phi * x[t - i - 1];
            }
        }
        for (j, theta) in ma.iter().enumerate() {
            if t > j {
                v += theta * shocks[t - j - 1];
            }
        }
        x[t] = v;
    }
    x.split_off(burn)
}

/// ARIMA(p, d, q): an ARMA path integrated `d` times from zero.
pub fn arima(ar: &[f64], d: usize, ma: &[f64], n: usize, seed: u64) -> Vec<f64> {
    let mut x = arma(ar, ma, n, seed);
    for _ in 0..d {
        let mut acc = 0.0;
        for v in x.iter_mut() {
            acc += *v;
            *v = acc;
        }
    }
    x
}
