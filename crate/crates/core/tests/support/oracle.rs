//! Brute-force ARMA likelihood: autocovariances from the MA(∞) weights and
//! a dense Cholesky evaluation of the joint Gaussian density.

use rand::Rng;

/// ψ-weights of `(1 − Σφ B^i)⁻¹ (1 + Σθ B^j)` until they stop mattering.
fn psi_weights(ar: &[f64], ma: &[f64]) -> Vec<f64> {
    let mut psi: Vec<f64> = Vec::new();
    let mut small_run = 0;
    for j in 0..200_000 {
        let mut v = if j == 0 {
            1.0
        } else {
            ma.get(j - 1).copied().unwrap_or(0.0)
        };
        for (i, phi) in ar.iter().enumerate() {
            if j > i {
                v += phi * psi[j - i - 1];
            }
        }
        psi.push(v);
        small_run = if v.abs() < 1e-20 { small_run + 1 } else { 0 };
        if j > ma.len() && small_run > ar.len() + 1 {
            break;
        }
    }
    psi
}

pub fn autocovariances(ar: &[f64], ma: &[f64], sigma2: f64, max_lag: usize) -> Vec<f64> {
    let psi = psi_weights(ar, ma);
    (0..=max_lag)
        .map(|k| {
            let mut s = 0.0;
            for j in (0..psi.len().saturating_sub(k)).rev() {
                s += psi[j] * psi[j + k];
            }
            sigma2 * s
        })
        .collect()
}

/// `log N(y − μ; 0, Γ)` with `Γ_ij = γ(|i − j|)`.
pub fn dense_loglik(y: &[f64], ar: &[f64], ma: &[f64], mean: f64, sigma2: f64) -> f64 {
    let n = y.len();
    let gamma = autocovariances(ar, ma, sigma2, n);
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = gamma[i - j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                assert!(s > 0.0, "covariance not positive definite");
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    // forward solve L z = y − μ
    let mut z = vec![0.0; n];
    for i in 0..n {
        let mut s = y[i] - mean;
        for k in 0..i {
            s -= l[i * n + k] * z[k];
        }
        z[i] = s / l[i * n + i];
    }
    let log_det: f64 = (0..n).map(|i| 2.0 * l[i * n + i].ln()).sum();
    let quad: f64 = z.iter().map(|v| v * v).sum();
    -0.5 * (n as f64 * (2.0 * std::f64::consts::PI).ln() + log_det + quad)
}

pub struct Case {
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub mean: f64,
    pub sigma2: f64,
    pub y: Vec<f64>,
}

/// Lag polynomial coefficients whose roots lie at modulus ≥ 1.15, in the
/// `1 − Σ c_i B^i` convention.
fn stable_poly(rng: &mut impl Rng, order: usize) -> Vec<f64> {
    match order {
        0 => vec![],
        1 => {
            let r: f64 = rng.random_range(1.15..4.0);
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            vec![sign / r]
        }
        _ => {
            if rng.random_bool(0.5) {
                let r1: f64 =
                    rng.random_range(1.15..4.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                let r2: f64 =
                    rng.random_range(1.15..4.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                vec![1.0 / r1 + 1.0 / r2, -1.0 / (r1 * r2)]
            } else {
                let r: f64 = rng.random_range(1.15..4.0);
                let w: f64 = rng.random_range(0.0..std::f64::consts::PI);
                vec![2.0 * w.cos() / r, -1.0 / (r * r)]
            }
        }
    }
}

pub fn draw_case(rng: &mut impl Rng) -> Case {
    let p = rng.random_range(0..=2);
    let q = rng.random_range(0..=2);
    let n = rng.random_range(5..=20);
    let ar = stable_poly(rng, p);
    // MA side: 1 + Σθ B^j, so negate the 1 − Σ c B^j coefficients
    let ma = stable_poly(rng, q).into_iter().map(|c| -c).collect();
    let mean = rng.random_range(-3.0..3.0);
    let sigma2 = rng.random_range(0.2..4.0);
    let y = (0..n).map(|_| mean + rng.random_range(-4.0..4.0)).collect();
    Case {
        ar,
        ma,
        mean,
        sigma2,
        y,
    }
}
