use forecast_core::arima::{
    arima_fit, arima_order_search, arima_order_search_with, ArimaOptions, ArimaOrder,
};
use forecast_core::{simulate, Exec, TimeSeries};

#[test]
fn ma2_on_second_differences() {
    let y = simulate::arima(&[], 2, &[-0.5, -0.3], 2000, 314);
    let train = TimeSeries::new(1, y).unwrap();
    let fit = arima_fit(&train, ArimaOrder::new(0, 2, 2)).unwrap();
    assert!((fit.ma_coeffs[0] + 0.5).abs() < 0.05, "{:?}", fit.ma_coeffs);
    assert!((fit.ma_coeffs[1] + 0.3).abs() < 0.05, "{:?}", fit.ma_coeffs);
    assert!((fit.sigma2 - 1.0).abs() < 0.1);
}

#[test]
fn ar1_search_picks_ar1() {
    let y = simulate::arma(&[0.8], &[], 1000, 2718);
    let train = TimeSeries::new(1, y).unwrap();
    let search = arima_order_search(&train, 0, 3, 3).unwrap();
    let best = search.best();
    assert_eq!(
        (best.order.p, best.order.q),
        (1, 0),
        "{:?}",
        search.ranking()
    );
    assert!((best.ar_coeffs[0] - 0.8).abs() < 0.05);
}

#[test]
fn nested_models_never_lose_likelihood() {
    let unscreened = ArimaOptions {
        min_root_modulus: 0.0,
        ..ArimaOptions::default()
    };
    for seed in 0..8 {
        let y = simulate::arima(&[0.3], 1, &[0.4], 60, seed);
        let train = TimeSeries::new(1, y).unwrap();
        let search =
            arima_order_search_with(&train, 1, 2, 2, &unscreened, Exec::default()).unwrap();
        let ll = |p: usize, q: usize| {
            search
                .ranked
                .iter()
                .find(|f| f.order == ArimaOrder::new(p, 1, q))
                .map(|f| f.log_likelihood)
        };
        for p in 0..=2 {
            for q in 0..=2 {
                let (Some(small), Some(big_p), Some(big_q)) = (
                    ll(p, q),
                    if p < 2 { ll(p + 1, q) } else { ll(p, q) },
                    if q < 2 { ll(p, q + 1) } else { ll(p, q) },
                ) else {
                    continue;
                };
                assert!(
                    big_p >= small - 1e-9,
                    "seed {seed}: ({p},{q}) {small} > p+1 {big_p}"
                );
                assert!(
                    big_q >= small - 1e-9,
                    "seed {seed}: ({p},{q}) {small} > q+1 {big_q}"
                );
            }
        }
    }
}
