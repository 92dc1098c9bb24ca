use nalgebra::{DMatrix, DVector};

pub(crate) struct OlsFit {
    pub coef: Vec<f64>,
    pub std_err: Vec<f64>,
    pub ssr: f64,
    pub nobs: usize,
}

impl OlsFit {
    /// `n·ln(SSR/n) + 2k`, enough to compare models on a common sample.
    pub fn aic(&self) -> f64 {
        let n = self.nobs as f64;
        n * (self.ssr / n).ln() + 2.0 * self.coef.len() as f64
    }
}

/// Least squares via QR; `None` when the design is rank deficient or leaves
/// no residual degrees of freedom.
pub(crate) fn ols(rows: &[Vec<f64>], y: &[f64]) -> Option<OlsFit> {
    let m = rows.len();
    let k = rows.first()?.len();
    if m <= k {
        return None;
    }
    let x = DMatrix::from_fn(m, k, |i, j| rows[i][j]);
    let yv = DVector::from_column_slice(y);
    let qr = x.clone().qr();
    let r = qr.r();
    let scale = (0..k).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if (0..k).any(|i| r[(i, i)].abs() <= 1e-12 * scale) {
        return None;
    }
    let qty = qr.q().transpose() * &yv;
    let beta = r.solve_upper_triangular(&qty)?;
    let resid = &yv - &x * &beta;
    let ssr = resid.dot(&resid);
    let s2 = ssr / (m - k) as f64;
    let r_inv = r.solve_upper_triangular(&DMatrix::identity(k, k))?;
    let cov_diag: Vec<f64> = (0..k)
        .map(|i| (0..k).map(|j| r_inv[(i, j)].powi(2)).sum::<f64>())
        .collect();
    Some(OlsFit {
        coef: beta.iter().copied().collect(),
        std_err: cov_diag.iter().map(|c| (s2 * c).sqrt()).collect(),
        ssr,
        nobs: m,
    })
}
