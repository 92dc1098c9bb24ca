//! Exact Gaussian likelihood of a zero-mean ARMA(p, q) by the Kalman
//! filter's prediction-error decomposition.
//!
//! State-space form with state dimension `r = max(p, q + 1)`:
//!
//! ```text
//! α_{t+1} = T α_t + R ε_t,   y_t = α_t[0]
//! T = [φ | I; 0],  R = [1, θ_1, ..., θ_{r−1}]ᵀ
//! ```
//!
//! The filter starts from the stationary covariance `P = T P Tᵀ + R Rᵀ`, so
//! the likelihood is exact rather than conditional. Variances are carried in
//! units of σ², which lets σ² be concentrated out.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::params::is_stationary;

pub(crate) struct StateSpace {
    r: usize,
    /// Row-major r×r.
    t: Vec<f64>,
    rvec: Vec<f64>,
}

impl StateSpace {
    pub fn new(ar: &[f64], ma: &[f64]) -> Self {
        let r = ar.len().max(ma.len() + 1);
        let mut t = vec![0.0; r * r];
        for (i, phi) in ar.iter().enumerate() {
            t[i * r] = *phi;
        }
        for i in 0..r - 1 {
            t[i * r + i + 1] = 1.0;
        }
        let mut rvec = vec![0.0; r];
        rvec[0] = 1.0;
        rvec[1..=ma.len()].copy_from_slice(ma);
        Self { r, t, rvec }
    }

    /// Solves `P = T P Tᵀ + R Rᵀ` through `(I − T⊗T) vec P = vec(R Rᵀ)`.
    fn stationary_covariance(&self) -> Option<Vec<f64>> {
        let r = self.r;
        let n = r * r;
        let mut a = DMatrix::<f64>::identity(n, n);
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    for l in 0..r {
                        a[(i * r + j, k * r + l)] -= self.t[i * r + k] * self.t[j * r + l];
                    }
                }
            }
        }
        let b = DVector::from_fn(n, |idx, _| self.rvec[idx / r] * self.rvec[idx % r]);
        let x = a.lu().solve(&b)?;
        // symmetrize against rounding
        let mut p = vec![0.0; n];
        for i in 0..r {
            for j in 0..r {
                p[i * r + j] = 0.5 * (x[i * r + j] + x[j * r + i]);
            }
        }
        Some(p)
    }
}

/// Filter output in σ² units.
pub(crate) struct Innovations {
    /// `y_t − E[y_t | past]`.
    pub v: Vec<f64>,
    /// Prediction variance divided by σ².
    pub f: Vec<f64>,
    /// Predicted state for the step after the last observation.
    pub next_state: Vec<f64>,
    space: StateSpace,
}

impl Innovations {
    /// `Σ v²/F`, the σ²-scaled sum of squares.
    pub fn weighted_ss(&self) -> f64 {
        self.v.iter().zip(&self.f).map(|(v, f)| v * v / f).sum()
    }

    pub fn log_det(&self) -> f64 {
        self.f.iter().map(|f| f.ln()).sum()
    }

    /// `E[y_{n+h} | y_1..y_n]` for `h = 1..=horizon`.
    pub fn forecast(&self, horizon: usize) -> Vec<f64> {
        let r = self.space.r;
        let mut a = self.next_state.clone();
        let mut out = Vec::with_capacity(horizon);
        for _ in 0..horizon {
            out.push(a[0]);
            a = (0..r)
                .map(|i| (0..r).map(|k| self.space.t[i * r + k] * a[k]).sum())
                .collect();
        }
        out
    }
}

pub(crate) fn filter(y: &[f64], ar: &[f64], ma: &[f64]) -> Result<Innovations> {
    if !is_stationary(ar) {
        return Err(Error::Constraint(format!(
            "AR coefficients {ar:?} are not stationary"
        )));
    }
    let space = StateSpace::new(ar, ma);
    let r = space.r;
    let t = &space.t;
    let rv = &space.rvec;
    let mut p = space
        .stationary_covariance()
        .ok_or(Error::Conditioning { step: 0 })?;
    let mut a = vec![0.0; r];
    let mut v_out = Vec::with_capacity(y.len());
    let mut f_out = Vec::with_capacity(y.len());
    let mut tp = vec![0.0; r * r];

    for (step, &obs) in y.iter().enumerate() {
        let f = p[0];
        if f <= 0.0 || !f.is_finite() {
            return Err(Error::Conditioning { step });
        }
        let v = obs - a[0];
        v_out.push(v);
        f_out.push(f);

        // update: a += P[:,0] v / F ; P -= P[:,0] P[0,:] / F
        let pcol: Vec<f64> = (0..r).map(|i| p[i * r]).collect();
        for i in 0..r {
            a[i] += pcol[i] * v / f;
        }
        for i in 0..r {
            for j in 0..r {
                p[i * r + j] -= pcol[i] * pcol[j] / f;
            }
        }

        // predict: a = T a ; P = T P Tᵀ + R Rᵀ
        let a_new: Vec<f64> = (0..r)
            .map(|i| (0..r).map(|k| t[i * r + k] * a[k]).sum())
            .collect();
        a = a_new;
        for i in 0..r {
            for j in 0..r {
                tp[i * r + j] = (0..r).map(|k| t[i * r + k] * p[k * r + j]).sum();
            }
        }
        for i in 0..r {
            for j in 0..r {
                let s: f64 = (0..r).map(|k| tp[i * r + k] * t[j * r + k]).sum();
                p[i * r + j] = s + rv[i] * rv[j];
            }
        }
    }
    Ok(Innovations {
        v: v_out,
        f: f_out,
        next_state: a,
        space,
    })
}

/// Full log-likelihood at a given σ².
pub(crate) fn log_likelihood(inn: &Innovations, sigma2: f64) -> f64 {
    let n = inn.v.len() as f64;
    -0.5 * (n * (2.0 * std::f64::consts::PI * sigma2).ln()
        + inn.log_det()
        + inn.weighted_ss() / sigma2)
}

/// Log-likelihood with σ² at its maximizer `Σ v²/F / n`; returns `(ℓ, σ̂²)`.
pub(crate) fn concentrated(inn: &Innovations) -> (f64, f64) {
    let sigma2 = inn.weighted_ss() / inn.v.len() as f64;
    (log_likelihood(inn, sigma2), sigma2)
}
