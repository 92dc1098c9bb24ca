//! Derivative-free minimizers: Nelder-Mead simplex and golden-section search.

/// Outcome of a Nelder-Mead run.
#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    /// Stop once the simplex values agree to this relative tolerance.
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_iter: usize,
    /// Edge length of the initial simplex along each axis.
    pub step: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_iter: 2000,
            step: 0.1,
        }
    }
}

fn eval<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64]) -> f64 {
    let v = f(x);
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

impl NelderMead {
    pub fn minimize<F: Fn(&[f64]) -> f64>(&self, f: F, x0: &[f64]) -> Minimum {
        let n = x0.len();
        if n == 0 {
            return Minimum {
                x: Vec::new(),
                value: eval(&f, x0),
                iterations: 0,
                converged: true,
            };
        }
        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        simplex.push(x0.to_vec());
        for i in 0..n {
            let mut v = x0.to_vec();
            v[i] += self.step;
            simplex.push(v);
        }
        let mut values: Vec<f64> = simplex.iter().map(|x| eval(&f, x)).collect();

        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iter {
            // sort ascending, stable on ties so runs are reproducible
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();

            let best = values[0];
            let worst = values[n];
            let spread = (worst - best).abs();
            if worst.is_finite()
                && spread <= self.rel_tol * 0.5 * (best.abs() + worst.abs()) + self.abs_tol
            {
                converged = true;
                break;
            }
            iterations += 1;

            let mut centroid = vec![0.0; n];
            for x in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / n as f64;
                }
            }
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n])
                    .map(|(c, w)| c + t * (w - c))
                    .collect()
            };

            let reflected = along(-1.0);
            let fr = eval(&f, &reflected);
            if fr < values[0] {
                let expanded = along(-2.0);
                let fe = eval(&f, &expanded);
                if fe < fr {
                    simplex[n] = expanded;
                    values[n] = fe;
                } else {
                    simplex[n] = reflected;
                    values[n] = fr;
                }
                continue;
            }
            if fr < values[n - 1] {
                simplex[n] = reflected;
                values[n] = fr;
                continue;
            }
            let (contracted, fc) = if fr < values[n] {
                let c = along(-0.5);
                let fc = eval(&f, &c);
                (c, fc)
            } else {
                let c = along(0.5);
                let fc = eval(&f, &c);
                (c, fc)
            };
            if fc < values[n].min(fr) {
                simplex[n] = contracted;
                values[n] = fc;
                continue;
            }
            // shrink toward the best vertex
            let best_x = simplex[0].clone();
            for i in 1..=n {
                for (xi, bi) in simplex[i].iter_mut().zip(&best_x) {
                    *xi = bi + 0.5 * (*xi - bi);
                }
                values[i] = eval(&f, &simplex[i]);
            }
        }

        let (best_idx, _) = values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("simplex is non-empty");
        Minimum {
            x: simplex[best_idx].clone(),
            value: values[best_idx],
            iterations,
            converged,
        }
    }
}

/// Minimizes a unimodal function on `[lo, hi]`; returns `(x, f(x))`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while (hi - lo).abs() > tol {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
