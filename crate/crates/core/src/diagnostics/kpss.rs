//! KPSS test of level stationarity with a Bartlett-kernel (Newey-West)
//! long-run variance.

use crate::error::{Error, Result};

use super::{mean, PValueBound, TestKind, TestResult};

const CRITICAL: [(f64, f64); 4] = [(0.347, 0.10), (0.463, 0.05), (0.574, 0.025), (0.739, 0.01)];

/// `floor(4·(n/100)^0.25)`.
pub fn kpss_bandwidth(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

fn interpolate_p(stat: f64) -> (f64, Option<PValueBound>) {
    let (first_cv, first_p) = CRITICAL[0];
    let (last_cv, last_p) = CRITICAL[CRITICAL.len() - 1];
    if stat <= first_cv {
        return (first_p, Some(PValueBound::AtLeast));
    }
    if stat >= last_cv {
        return (last_p, Some(PValueBound::AtMost));
    }
    for w in CRITICAL.windows(2) {
        let ((c0, p0), (c1, p1)) = (w[0], w[1]);
        if stat <= c1 {
            return (p0 + (stat - c0) / (c1 - c0) * (p1 - p0), None);
        }
    }
    unreachable!("stat lies inside the table")
}

pub fn kpss_test(series: &[f64]) -> Result<TestResult> {
    let n = series.len();
    if n < 10 {
        return Err(Error::TooShort {
            required: 10,
            actual: n,
        });
    }
    let m = mean(series);
    let e: Vec<f64> = series.iter().map(|y| y - m).collect();
    let bandwidth = kpss_bandwidth(n);
    let nf = n as f64;
    let autocov = |j: usize| e.iter().zip(&e[j..]).map(|(a, b)| a * b).sum::<f64>() / nf;
    let mut lrv = autocov(0);
    for j in 1..=bandwidth {
        let w = 1.0 - j as f64 / (bandwidth as f64 + 1.0);
        lrv += 2.0 * w * autocov(j);
    }
    let scale = series.iter().map(|y| y * y).sum::<f64>() / nf;
    if lrv <= 1e-24 * scale || lrv <= 0.0 {
        return Err(Error::DegenerateVariance);
    }
    let mut partial = 0.0;
    let mut eta = 0.0;
    for v in &e {
        partial += v;
        eta += partial * partial;
    }
    let stat = eta / (nf * nf * lrv);
    let (p, bound) = interpolate_p(stat);
    Ok(TestResult::new(
        TestKind::Kpss,
        stat,
        p,
        bound,
        bandwidth,
        0,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate;

    #[test]
    fn table_interpolation() {
        assert_eq!(interpolate_p(0.2), (0.10, Some(PValueBound::AtLeast)));
        assert_eq!(interpolate_p(1.5), (0.01, Some(PValueBound::AtMost)));
        let (p, b) = interpolate_p(0.463);
        assert!((p - 0.05).abs() < 1e-12 && b.is_none());
        let (p, _) = interpolate_p((0.463 + 0.574) / 2.0);
        assert!((p - 0.0375).abs() < 1e-12);
    }

    #[test]
    fn bandwidth_rule() {
        assert_eq!(kpss_bandwidth(100), 4);
        assert_eq!(kpss_bandwidth(500), 5);
        assert_eq!(kpss_bandwidth(36), 3);
    }

    #[test]
    fn hand_computed_statistic() {
        // n = 10, bandwidth floor(4·0.1^0.25) = 2
        let s = [1.0, 3.0, 2.0, 5.0, 4.0, 6.0, 5.0, 8.0, 7.0, 9.0];
        let m = 5.0;
        let e: Vec<f64> = s.iter().map(|y| y - m).collect();
        let g = |j: usize| (j..10).map(|t| e[t] * e[t - j]).sum::<f64>() / 10.0;
        let lrv = g(0) + 2.0 * (2.0 / 3.0) * g(1) + 2.0 * (1.0 / 3.0) * g(2);
        let mut acc = 0.0;
        let mut eta = 0.0;
        for v in &e {
            acc += v;
            eta += acc * acc;
        }
        let expected = eta / (100.0 * lrv);
        let r = kpss_test(&s).unwrap();
        assert!((r.statistic - expected).abs() < 1e-12);
        assert_eq!(r.lags_used, 2);
    }

    #[test]
    fn constant_degenerate() {
        assert_eq!(kpss_test(&[3.0; 20]), Err(Error::DegenerateVariance));
    }

    #[test]
    fn white_noise_upper_bound() {
        let hits = (0..100)
            .filter(|&seed| {
                let r = kpss_test(&simulate::normal(500, seed)).unwrap();
                r.p_bound == Some(PValueBound::AtLeast)
            })
            .count();
        assert!(hits >= 90, "{hits}/100");
    }

    #[test]
    fn random_walk_lower_bound() {
        let hits = (0..100)
            .filter(|&seed| {
                let r = kpss_test(&simulate::random_walk(500, 500 + seed)).unwrap();
                r.p_bound == Some(PValueBound::AtMost)
            })
            .count();
        assert!(hits >= 90, "{hits}/100");
    }
}
