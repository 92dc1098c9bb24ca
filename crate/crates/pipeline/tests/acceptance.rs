//! Acceptance checks, one line each: `criterion N ... PASS|FAIL`.
//! Exits non-zero if any criterion fails.

#[path = "../../core/tests/support/oracle.rs"]
mod oracle;

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use forecast_core::arima::{arima_fit, arima_loglik, arima_order_search, ArimaOrder, ArmaParams};
use forecast_core::diagnostics::calibration::rejection_rate;
use forecast_core::diagnostics::{
    adf_test, default_ljung_box_lags, kpss_test, ljung_box, shapiro_wilk, LagSelection,
    PValueBound, TestKind, TestResult,
};
use forecast_core::ensemble::{evaluate_models, ModelKind, ModelSet};
use forecast_core::smoothing::{
    hdes_fit, hdes_forecast, hdes_run, hdes_sse, ses_fit, ses_forecast, ses_run, ses_sse,
};
use forecast_core::{simulate, Exec, TimeSeries};
use forecast_pipeline::report::parse_kv;
use forecast_pipeline::{emit, execute, load_csv, RunConfig, RunResults};

use common::{snapshot, synthetic_rates, write_csv};

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(name: &str, value: f64, target: f64, tol: f64) -> Result<(), String> {
    ensure((value - target).abs() <= tol, || {
        format!("{name} = {value:.4}, want {target} ± {tol}")
    })
}

fn budget(started: Instant, limit: Duration) -> Result<(), String> {
    let took = started.elapsed();
    ensure(took < limit, || {
        format!(
            "took {:.2} s, limit {} s",
            took.as_secs_f64(),
            limit.as_secs()
        )
    })
}

fn seer_path() -> PathBuf {
    std::env::var_os("FORECAST_SEER_CSV")
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR"))
                .join("../../data/seer_lung_mortality_1975_2021.csv")
        })
}

struct SeerRun {
    results: RunResults,
    elapsed: Duration,
}

fn seer_run() -> Result<SeerRun, String> {
    let path = seer_path();
    if !path.exists() {
        return Err(format!(
            "dataset unavailable: {} not found (set FORECAST_SEER_CSV)",
            path.display()
        ));
    }
    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    let started = Instant::now();
    let series = load_csv(&path).map_err(|e| e.to_string())?;
    ensure(
        series.start_year() == 1975 && series.end_year() == 2021,
        || {
            format!(
                "expected 1975-2021, file covers {}-{}",
                series.start_year(),
                series.end_year()
            )
        },
    )?;
    let mut config = RunConfig::new(&path, 2012);
    config.out_dir = out.path().to_path_buf();
    config.plots = true;
    let mut results = execute(&config, series).map_err(|e| e.to_string())?;
    emit(&mut results).map_err(|e| e.to_string())?;
    Ok(SeerRun {
        results,
        elapsed: started.elapsed(),
    })
}

fn criterion_1(run: &Result<SeerRun, String>) -> Check {
    let run = run.as_ref().map_err(Clone::clone)?;
    let r = &run.results;
    ensure(r.failures.is_empty(), || {
        format!("stage failures: {:?}", r.failures)
    })?;
    ensure(r.d == Some(2), || format!("ADF chose d = {:?}", r.d))?;
    let arima = &r.evaluation.fits.arima.as_ref().ok_or("no ARIMA fit")?.fit;
    ensure(arima.order == ArimaOrder::new(0, 2, 2), || {
        format!("AIC picked {:?}", arima.order)
    })?;
    let row = |k: ModelKind| r.evaluation.row(k).ok_or(format!("no {k} row"));
    let a = row(ModelKind::Arima)?;
    within("ARIMA RMSE", a.rmse, 2.56, 0.30)?;
    within("ARIMA MAE", a.mae, 2.16, 0.30)?;
    within("ARIMA MAPE", a.mape_percent, 6.29, 0.75)?;
    within("HDES RMSE", row(ModelKind::Hdes)?.rmse, 2.56, 0.30)?;
    let hdes = r.evaluation.fits.hdes.as_ref().ok_or("no HDES fit")?;
    within("HDES alpha", hdes.alpha, 0.52, 0.08)?;
    within("HDES beta", hdes.beta, 0.52, 0.08)?;
    within("SES RMSE", row(ModelKind::Ses)?.rmse, 8.90, 1.00)?;
    let ses = r.evaluation.fits.ses.as_ref().ok_or("no SES fit")?;
    ensure(ses.alpha >= 0.98, || format!("SES alpha = {}", ses.alpha))?;
    within(
        "HDES-ARIMA RMSE",
        row(ModelKind::HdesArima)?.rmse,
        2.56,
        0.30,
    )?;
    ensure(run.elapsed < Duration::from_secs(10), || {
        format!("took {:.2} s, limit 10 s", run.elapsed.as_secs_f64())
    })?;
    Ok(format!(
        "ARIMA(0,2,2) RMSE {:.2}, HDES RMSE {:.2}, SES RMSE {:.2}, {:.2} s",
        a.rmse,
        row(ModelKind::Hdes)?.rmse,
        row(ModelKind::Ses)?.rmse,
        run.elapsed.as_secs_f64()
    ))
}

fn test_of(r: &RunResults, model: ModelKind, kind: TestKind) -> Result<TestResult, String> {
    r.diagnostics_for(model)
        .and_then(|d| d.test(kind))
        .ok_or_else(|| format!("{model} {kind} missing"))?
        .clone()
        .map_err(|e| format!("{model} {kind}: {e}"))
}

fn criterion_2(run: &Result<SeerRun, String>) -> Check {
    let r = &run.as_ref().map_err(Clone::clone)?.results;
    let order = r.evaluation.fits.arima.as_ref().map(|a| a.fit.order);
    ensure(order == Some(ArimaOrder::new(0, 2, 2)), || {
        format!("ARIMA order is {order:?}")
    })?;
    let expect = |model, kind, reject: bool| -> Result<(), String> {
        let t = test_of(r, model, kind)?;
        ensure(t.reject_at_005 == reject, || {
            format!("{model} {kind} p = {}", t.p_display())
        })
    };
    expect(ModelKind::Arima, TestKind::LjungBox, false)?;
    expect(ModelKind::Arima, TestKind::ShapiroWilk, false)?;
    let kpss = test_of(r, ModelKind::Arima, TestKind::Kpss)?;
    ensure(
        kpss.p_bound == Some(PValueBound::AtLeast) && kpss.p_value == 0.1,
        || format!("ARIMA KPSS p = {}", kpss.p_display()),
    )?;
    expect(ModelKind::Hdes, TestKind::LjungBox, false)?;
    expect(ModelKind::Hdes, TestKind::ShapiroWilk, false)?;
    expect(ModelKind::Ses, TestKind::LjungBox, true)?;
    expect(ModelKind::Ses, TestKind::ShapiroWilk, false)?;
    Ok("ARIMA LB/SW pass, KPSS >= 0.1; HDES LB/SW pass; SES LB fails, SW passes".into())
}

fn criterion_3(run: &Result<SeerRun, String>) -> Check {
    let r = &run.as_ref().map_err(Clone::clone)?.results;
    let f = r
        .future_forecast(ModelKind::HdesArima)
        .ok_or("no HDES-ARIMA forecast")?;
    ensure(f.first_year() == 2022 && f.last_year() == 2030, || {
        format!("forecast spans {}-{}", f.first_year(), f.last_year())
    })?;
    let v = f.values();
    ensure(v.windows(2).all(|w| w[1] < w[0]), || {
        format!("not strictly decreasing: {v:?}")
    })?;
    ensure(v.iter().all(|&x| x > 0.0), || {
        format!("non-positive: {v:?}")
    })?;
    Ok(format!("{:.2} -> {:.2}", v[0], v[v.len() - 1]))
}

fn criterion_4() -> Check {
    let started = Instant::now();
    let mut rng = simulate::rng(20_240_601);
    let mut worst = 0.0f64;
    for case_no in 0..200 {
        let c = oracle::draw_case(&mut rng);
        let params = ArmaParams {
            ar: c.ar.clone(),
            ma: c.ma.clone(),
            mean: c.mean,
            sigma2: c.sigma2,
        };
        let kalman = arima_loglik(&c.y, &params).map_err(|e| format!("case {case_no}: {e}"))?;
        let dense = oracle::dense_loglik(&c.y, &c.ar, &c.ma, c.mean, c.sigma2);
        let gap = (kalman - dense).abs();
        ensure(gap < 1e-8, || {
            format!("case {case_no} (ar {:?}, ma {:?}): gap {gap:e}", c.ar, c.ma)
        })?;
        worst = worst.max(gap);
    }
    budget(started, Duration::from_secs(5))?;
    Ok(format!("200 cases, max gap {worst:.1e}"))
}

fn criterion_5() -> Check {
    let started = Instant::now();
    let y = simulate::arima(&[], 2, &[-0.5, -0.3], 2000, 314);
    let fit = arima_fit(&TimeSeries::new(1, y).unwrap(), ArimaOrder::new(0, 2, 2))
        .map_err(|e| e.to_string())?;
    within("theta1", fit.ma_coeffs[0], -0.5, 0.05)?;
    within("theta2", fit.ma_coeffs[1], -0.3, 0.05)?;
    let y = simulate::arma(&[0.8], &[], 1000, 2718);
    let search =
        arima_order_search(&TimeSeries::new(1, y).unwrap(), 0, 3, 3).map_err(|e| e.to_string())?;
    let best = search.best().order;
    ensure((best.p, best.q) == (1, 0), || {
        format!("AR(1) search picked ({},{})", best.p, best.q)
    })?;
    budget(started, Duration::from_secs(60))?;
    Ok(format!(
        "theta = ({:.3}, {:.3}); AR(1) search -> (1,0); {:.2} s",
        fit.ma_coeffs[0],
        fit.ma_coeffs[1],
        started.elapsed().as_secs_f64()
    ))
}

fn close(name: &str, got: f64, want: f64) -> Result<(), String> {
    ensure((got - want).abs() <= 1e-12, || {
        format!("{name}: {got} vs {want}")
    })
}

fn criterion_6() -> Check {
    let line: Vec<f64> = (1..=47).map(|t| 3.0 + 2.0 * t as f64).collect();
    let (train, test) = TimeSeries::new(1975, line).unwrap().split_at(2012).unwrap();
    let set = ModelSet {
        models: vec![ModelKind::Hdes],
        ..ModelSet::default()
    };
    let report = evaluate_models(&train, &test, &set).map_err(|e| e.to_string())?;
    let hdes = report.row(ModelKind::Hdes).ok_or("no HDES row")?;
    ensure(hdes.rmse < 1e-9 && hdes.mae < 1e-9, || {
        format!("HDES on a line: RMSE {:e}, MAE {:e}", hdes.rmse, hdes.mae)
    })?;
    let fit = hdes_fit(&train).map_err(|e| e.to_string())?;
    for (h, v) in hdes_forecast(&fit, 4).unwrap().values().iter().enumerate() {
        close("HDES line forecast", *v, 3.0 + 2.0 * (39 + h) as f64)?;
    }

    let flat = TimeSeries::new(2000, vec![5.0; 5]).unwrap();
    let ses = ses_fit(&flat).map_err(|e| e.to_string())?;
    ensure(
        ses_forecast(&ses, 5).unwrap().values() == [5.0; 5] && ses.sse == 0.0,
        || "SES on a constant series is not flat at 5".into(),
    )?;

    let (level, res) = ses_run(&[1.0, 2.0, 3.0], 0.5);
    close("SES level", level, 2.25)?;
    close("SES residual t=2", res[1], 1.0)?;
    close("SES residual t=3", res[2], 1.5)?;
    close("SES SSE", ses_sse(&[1.0, 2.0, 3.0], 0.5), 3.25)?;
    let (_, _, res) = hdes_run(&[1.0, 2.0, 4.0], 0.5, 0.5);
    close("HDES residual t=2", res[1], 0.0)?;
    close("HDES residual t=3", res[2], 1.0)?;
    close("HDES SSE", hdes_sse(&[1.0, 2.0, 4.0], 0.5, 0.5), 1.0)?;
    Ok(format!(
        "linear holdout RMSE {:.1e}; hand traces exact",
        hdes.rmse
    ))
}

fn criterion_7() -> Check {
    let started = Instant::now();
    let exec = Exec::default();
    let mut sizes = Vec::new();
    for (i, n) in [20usize, 38, 100].into_iter().enumerate() {
        let base = 1_000_000 * (i as u64 + 1);
        let lags = default_ljung_box_lags(n);
        let lb = rejection_rate(exec, 10_000, base, |s| {
            ljung_box(&simulate::normal(n, s), lags, 0)
        });
        let sw = rejection_rate(exec, 10_000, base + 500_000, |s| {
            shapiro_wilk(&simulate::normal(n, s))
        });
        for (name, r) in [("Ljung-Box", lb), ("Shapiro-Wilk", sw)] {
            ensure(r.failures == 0 && (0.03..=0.07).contains(&r.rate), || {
                format!("{name} n={n}: size {:.4} ({} errors)", r.rate, r.failures)
            })?;
            sizes.push(format!("{name} n={n} {:.3}", r.rate));
        }
    }

    let share = |reps: usize, base: u64, hit: &(dyn Fn(u64) -> bool + Sync)| -> f64 {
        let hits = forecast_core::par::map_indices(exec, reps, |i| hit(base + i as u64));
        hits.iter().filter(|&&h| h).count() as f64 / reps as f64
    };
    let adf = |x: Vec<f64>| adf_test(&x, LagSelection::default()).map(|t| t.reject_at_005);
    let kpss_bound =
        |x: Vec<f64>, b: PValueBound| kpss_test(&x).map(|t| t.p_bound == Some(b)).unwrap_or(false);
    let directional = [
        (
            "ADF keeps unit root on random walk",
            share(10_000, 7_000_000, &|s| {
                adf(simulate::random_walk(200, s)) == Ok(false)
            }),
        ),
        (
            "ADF rejects on white noise",
            share(10_000, 7_100_000, &|s| {
                adf(simulate::normal(200, s)) == Ok(true)
            }),
        ),
        (
            "KPSS >= 0.10 on white noise",
            share(10_000, 7_200_000, &|s| {
                kpss_bound(simulate::normal(500, s), PValueBound::AtLeast)
            }),
        ),
        (
            "KPSS <= 0.01 on random walk",
            share(10_000, 7_300_000, &|s| {
                kpss_bound(simulate::random_walk(500, s), PValueBound::AtMost)
            }),
        ),
    ];
    for (name, rate) in &directional {
        ensure(*rate >= 0.90, || format!("{name}: {rate:.3}"))?;
    }
    budget(started, Duration::from_secs(120))?;
    Ok(format!(
        "{}; directional min {:.3}; {:.1} s",
        sizes.join(", "),
        directional.iter().map(|d| d.1).fold(1.0, f64::min),
        started.elapsed().as_secs_f64()
    ))
}

fn criterion_8() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let values = synthetic_rates(47, 2021);
    let csv = write_csv(dir.path(), "rates.csv", 1975, &values);
    let run = |tag: &str, input: &PathBuf, threads: &str, exec: &str| -> Result<PathBuf, String> {
        let out = dir.path().join(tag);
        let status = Command::new(env!("CARGO_BIN_EXE_forecast"))
            .args(["run", "--input"])
            .arg(input)
            .args(["--train-end", "2012", "--plots", "--exec", exec, "--out"])
            .arg(&out)
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(status.status.success(), || {
            format!("{tag}: {}", String::from_utf8_lossy(&status.stderr))
        })?;
        Ok(out)
    };
    let reference = snapshot(&run("a", &csv, "1", "sequential")?);
    for (tag, threads, exec) in [
        ("b", "1", "sequential"),
        ("c", "2", "parallel"),
        ("d", "8", "parallel"),
    ] {
        ensure(
            snapshot(&run(tag, &csv, threads, exec)?) == reference,
            || format!("run {tag} ({threads} threads, {exec}) differs"),
        )?;
    }

    let mut perturbed = values.clone();
    for v in &mut perturbed[38..] {
        *v = *v * 0.5 + 3.0;
    }
    let csv2 = write_csv(dir.path(), "perturbed.csv", 1975, &perturbed);
    let kv = |p: PathBuf| parse_kv(&std::fs::read_to_string(p.join("results.kv")).unwrap());
    let (a, b) = (
        kv(dir.path().join("a")),
        kv(run("e", &csv2, "4", "parallel")?),
    );
    let fitted = [
        "differencing.",
        "adf.",
        "search.",
        "arima.",
        "ses.",
        "hdes.",
        "diagnostics.",
        "metrics.",
    ];
    let mut compared = 0;
    for (key, value) in &a {
        let is_param = fitted.iter().any(|p| key.starts_with(p))
            && !["rmse", "mae", "mape_percent"]
                .iter()
                .any(|m| key.ends_with(m));
        if is_param {
            compared += 1;
            ensure(b.get(key) == Some(value), || {
                format!("{key} changed: {value} -> {:?}", b.get(key))
            })?;
        }
    }
    for key in a
        .keys()
        .filter(|k| k.starts_with("holdout.") && *k != "holdout.years")
    {
        ensure(a[key] == b[key], || format!("{key} changed"))?;
    }
    ensure(a["metrics.arima.rmse"] != b["metrics.arima.rmse"], || {
        "perturbation did not reach the holdout".into()
    })?;
    Ok(format!(
        "{} files identical over 4 runs; {compared} fitted values unchanged under perturbation",
        reference.len()
    ))
}

fn main() {
    let seer = seer_run();
    let criteria: [Criterion; 8] = [
        (
            "holdout table reproduction",
            Box::new(|| criterion_1(&seer)),
        ),
        ("residual decisions", Box::new(|| criterion_2(&seer))),
        ("forecast direction", Box::new(|| criterion_3(&seer))),
        ("likelihood oracle", Box::new(criterion_4)),
        ("parameter recovery", Box::new(criterion_5)),
        ("smoothing fixed points", Box::new(criterion_6)),
        ("test calibration", Box::new(criterion_7)),
        ("determinism and isolation", Box::new(criterion_8)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
