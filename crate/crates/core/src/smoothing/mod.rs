//! Simple and Holt (double) exponential smoothing.
//!
//! Both models are fitted by minimizing one-step-ahead SSE: a full grid scan
//! (evaluated in parallel, reduced in a fixed order) followed by a local
//! refinement that is only accepted when it strictly improves on the grid.

mod holt;
mod ses;

pub use holt::{hdes_fit, hdes_fit_with, hdes_forecast, hdes_run, hdes_sse, HdesFit, HDES_GRID};
pub use ses::{ses_fit, ses_fit_with, ses_forecast, ses_run, ses_sse, SesFit, SES_GRID};

/// Smallest SSE; ties go to the lowest grid index. The result does not depend
/// on the order of `cells`.
pub(crate) fn argmin_cell(cells: &[(f64, usize)]) -> Option<(f64, usize)> {
    cells
        .iter()
        .copied()
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn argmin_is_order_independent(
            sse in prop::collection::vec(prop::sample::select(vec![0.5, 1.0, 1.5, 2.0]), 2..60),
            seed in 0u64..1000,
        ) {
            use rand::seq::SliceRandom;
            let cells: Vec<(f64, usize)> = sse.iter().copied().zip(0..).collect();
            let mut shuffled = cells.clone();
            shuffled.shuffle(&mut crate::simulate::rng(seed));
            prop_assert_eq!(argmin_cell(&cells), argmin_cell(&shuffled));
            let (best, idx) = argmin_cell(&cells).unwrap();
            prop_assert_eq!(idx, cells.iter().position(|c| c.0 == best).unwrap());
        }
    }
}
