//! Partial-autocorrelation reparameterization of AR and MA polynomials.
//!
//! An unconstrained vector `u` maps to partials `r_k = tanh(u_k)` in (−1, 1),
//! and the Durbin-Levinson step-up turns partials into coefficients. Every
//! `u` yields a stationary AR polynomial `1 − Σ φ_i z^i`; MA coefficients are
//! taken as `θ = −φ(u)`, which makes `1 + Σ θ_j z^j` invertible.

use nalgebra::DMatrix;

/// Largest |u| used; keeps partials away from ±1 where the stationary
/// covariance becomes singular.
const U_LIMIT: f64 = 10.0;

/// Step-up: partials → coefficients of `1 − Σ φ_i z^i`.
pub fn partials_to_coeffs(partials: &[f64]) -> Vec<f64> {
    let mut phi: Vec<f64> = Vec::with_capacity(partials.len());
    for (k, &r) in partials.iter().enumerate() {
        let prev = phi.clone();
        for j in 0..k {
            phi[j] = prev[j] - r * prev[k - 1 - j];
        }
        phi.push(r);
    }
    phi
}

/// Step-down: coefficients → partials. `None` when a partial reaches ±1,
/// i.e. the polynomial has a root on or inside the unit circle.
pub fn coeffs_to_partials(coeffs: &[f64]) -> Option<Vec<f64>> {
    let p = coeffs.len();
    let mut partials = vec![0.0; p];
    let mut cur = coeffs.to_vec();
    for k in (0..p).rev() {
        let r = cur[k];
        if !r.is_finite() || r.abs() >= 1.0 {
            return None;
        }
        partials[k] = r;
        let denom = 1.0 - r * r;
        let prev: Vec<f64> = (0..k)
            .map(|j| (cur[j] + r * cur[k - 1 - j]) / denom)
            .collect();
        cur = prev;
    }
    Some(partials)
}

pub fn is_stationary(ar: &[f64]) -> bool {
    coeffs_to_partials(ar).is_some()
}

pub fn is_invertible(ma: &[f64]) -> bool {
    let neg: Vec<f64> = ma.iter().map(|t| -t).collect();
    coeffs_to_partials(&neg).is_some()
}

/// Largest |partial| of the MA polynomial; values near 1 mean a root close
/// to the unit circle.
pub fn ma_boundary_closeness(ma: &[f64]) -> f64 {
    let neg: Vec<f64> = ma.iter().map(|t| -t).collect();
    coeffs_to_partials(&neg)
        .map(|r| r.iter().fold(0.0f64, |m, v| m.max(v.abs())))
        .unwrap_or(1.0)
}

/// Smallest root modulus of `1 − Σ c_i z^i`; infinite for a constant
/// polynomial.
pub fn min_root_modulus(coeffs: &[f64]) -> f64 {
    let k = coeffs.iter().rposition(|c| *c != 0.0).map_or(0, |i| i + 1);
    if k == 0 {
        return f64::INFINITY;
    }
    // companion eigenvalues are the inverse roots
    let companion = DMatrix::from_fn(k, k, |i, j| {
        if i == 0 {
            coeffs[j]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let radius = companion
        .complex_eigenvalues()
        .iter()
        .fold(0.0f64, |m, z| m.max(z.norm()));
    1.0 / radius
}

/// Smallest root modulus over the AR polynomial and the MA polynomial
/// `1 + Σ θ_j z^j`.
pub fn min_arma_root_modulus(ar: &[f64], ma: &[f64]) -> f64 {
    let neg: Vec<f64> = ma.iter().map(|t| -t).collect();
    min_root_modulus(ar).min(min_root_modulus(&neg))
}

pub fn ar_from_free(u: &[f64]) -> Vec<f64> {
    let partials: Vec<f64> = u
        .iter()
        .map(|v| v.clamp(-U_LIMIT, U_LIMIT).tanh())
        .collect();
    partials_to_coeffs(&partials)
}

pub fn ma_from_free(u: &[f64]) -> Vec<f64> {
    ar_from_free(u).into_iter().map(|c| -c).collect()
}

/// Inverse of [`ar_from_free`]; coefficients outside the region are pulled
/// just inside it.
pub fn ar_to_free(ar: &[f64]) -> Vec<f64> {
    match coeffs_to_partials(ar) {
        Some(r) => r.iter().map(|v| v.clamp(-0.999, 0.999).atanh()).collect(),
        None => vec![0.0; ar.len()],
    }
}

pub fn ma_to_free(ma: &[f64]) -> Vec<f64> {
    let neg: Vec<f64> = ma.iter().map(|t| -t).collect();
    ar_to_free(&neg)
}
