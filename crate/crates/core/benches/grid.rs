use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use forecast_core::arima::{arima_order_search_with, ArimaOptions};
use forecast_core::diagnostics::calibration::rejection_rate;
use forecast_core::diagnostics::shapiro_wilk;
use forecast_core::smoothing::hdes_fit_with;
use forecast_core::{simulate, Exec, TimeSeries};

const MODES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn series(n: usize) -> TimeSeries {
    let y = simulate::arima(&[], 2, &[-0.5, -0.3], n, 9);
    let lift = 1.0 - y.iter().cloned().fold(f64::INFINITY, f64::min);
    TimeSeries::new(1975, y.iter().map(|v| v + lift).collect()).unwrap()
}

fn hdes_grid(c: &mut Criterion) {
    let train = series(38);
    let mut g = c.benchmark_group("hdes_grid");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| hdes_fit_with(black_box(&train), exec).unwrap())
        });
    }
    g.finish();
}

fn order_search(c: &mut Criterion) {
    let train = series(38);
    let opts = ArimaOptions::default();
    let mut g = c.benchmark_group("order_search_3x3");
    g.sample_size(20);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| arima_order_search_with(black_box(&train), 2, 3, 3, &opts, exec).unwrap())
        });
    }
    g.finish();
}

fn calibration(c: &mut Criterion) {
    let mut g = c.benchmark_group("shapiro_wilk_size_2000");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| {
                rejection_rate(exec, 2000, 1, |seed| {
                    shapiro_wilk(&simulate::normal(38, seed))
                })
            })
        });
    }
    g.finish();
}

criterion_group!(benches, hdes_grid, order_search, calibration);
criterion_main!(benches);
