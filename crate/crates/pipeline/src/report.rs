//! `report.md` and `results.kv` rendering, plus atomic file writes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use forecast_core::diagnostics::{PValueBound, TestKind, TestResult};

use crate::error::PipelineError;
use crate::pipeline::RunResults;

/// Two decimals, or three below one.
pub fn fmt_metric(v: f64) -> String {
    if v.abs() < 1.0 {
        format!("{v:.3}")
    } else {
        format!("{v:.2}")
    }
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:?}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn bound(b: Option<PValueBound>) -> &'static str {
    match b {
        None => "exact",
        Some(PValueBound::AtLeast) => "at_least",
        Some(PValueBound::AtMost) => "at_most",
    }
}

struct Kv(String);

impl Kv {
    fn put(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.0, "{key} = {value}");
    }

    fn num(&mut self, key: &str, v: f64) {
        self.put(key, format!("{v:?}"));
    }

    fn test(&mut self, prefix: &str, r: &Result<TestResult, String>) {
        match r {
            Ok(t) => {
                self.num(&format!("{prefix}.statistic"), t.statistic);
                self.num(&format!("{prefix}.p_value"), t.p_value);
                self.put(&format!("{prefix}.p_bound"), bound(t.p_bound));
                self.put(&format!("{prefix}.lags"), t.lags_used);
                self.put(&format!("{prefix}.df"), t.df);
                self.put(&format!("{prefix}.reject_005"), t.reject_at_005);
            }
            Err(e) => self.put(&format!("{prefix}.error"), e),
        }
    }
}

/// Flat `key = value` lines; numbers are written so they parse back to the
/// identical `f64`.
pub fn render_kv(r: &RunResults) -> String {
    let mut kv = Kv(String::new());
    kv.put("version", env!("CARGO_PKG_VERSION"));
    kv.put("data.first_year", r.series.start_year());
    kv.put("data.last_year", r.series.end_year());
    kv.put("split.train_end", r.train.end_year());
    kv.put("split.test_first", r.test.start_year());
    kv.put("split.test_last", r.test.end_year());
    kv.put("config.horizon", r.config.horizon);
    kv.put(
        "config.models",
        r.config
            .models
            .iter()
            .map(|m| m.key())
            .collect::<Vec<_>>()
            .join(","),
    );
    kv.put("config.p_max", r.config.p_max);
    kv.put("config.q_max", r.config.q_max);
    kv.put("config.d_max", r.config.d_max);
    kv.put("config.seed", r.config.seed);

    if let Some(d) = r.d {
        kv.put("differencing.d", d);
        kv.put(
            "differencing.source",
            if r.config.fix_d.is_some() {
                "fixed"
            } else {
                "adf"
            },
        );
    }
    if let Some(choice) = &r.differencing {
        kv.put("differencing.degenerate", choice.degenerate);
        kv.put("differencing.exhausted", choice.exhausted);
        for (order, t) in choice.adf.iter().enumerate() {
            kv.test(&format!("adf.d{order}"), &Ok(t.clone()));
        }
    }
    if let Some(search) = &r.search {
        for (i, fit) in search.ranked.iter().enumerate() {
            let o = fit.order;
            kv.put(
                &format!("search.rank.{i}.order"),
                format!("{},{},{}", o.p, o.d, o.q),
            );
            kv.num(&format!("search.rank.{i}.aic"), fit.aic);
        }
        for (i, s) in search.skipped.iter().enumerate() {
            let o = s.order;
            kv.put(
                &format!("search.skipped.{i}.order"),
                format!("{},{},{}", o.p, o.d, o.q),
            );
            kv.put(&format!("search.skipped.{i}.reason"), &s.reason);
        }
    }

    let fits = &r.evaluation.fits;
    if let Some(sel) = &fits.arima {
        let f = &sel.fit;
        kv.put(
            "arima.order",
            format!("{},{},{}", f.order.p, f.order.d, f.order.q),
        );
        kv.put("arima.ar", join(&f.ar_coeffs));
        kv.put("arima.ma", join(&f.ma_coeffs));
        kv.put("arima.constant_estimated", f.constant_estimated);
        kv.num("arima.mean", f.mean);
        kv.num("arima.constant", f.constant);
        kv.num("arima.sigma2", f.sigma2);
        kv.num("arima.log_likelihood", f.log_likelihood);
        kv.num("arima.aic", f.aic);
        kv.put("arima.ma_near_boundary", f.ma_near_boundary);
    }
    if let Some(f) = &fits.ses {
        kv.num("ses.alpha", f.alpha);
        kv.num("ses.final_level", f.final_level);
        kv.num("ses.sse", f.sse);
    }
    if let Some(f) = &fits.hdes {
        kv.num("hdes.alpha", f.alpha);
        kv.num("hdes.beta", f.beta);
        kv.num("hdes.final_level", f.final_level);
        kv.num("hdes.final_trend", f.final_trend);
        kv.num("hdes.sse", f.sse);
    }

    for diag in &r.diagnostics {
        let key = diag.model.key();
        kv.put(&format!("diagnostics.{key}.n"), diag.residuals.len());
        for (kind, result) in &diag.tests {
            let name = match kind {
                TestKind::Adf => "adf",
                TestKind::Kpss => "kpss",
                TestKind::LjungBox => "ljung_box",
                TestKind::ShapiroWilk => "shapiro_wilk",
            };
            kv.test(&format!("diagnostics.{key}.{name}"), result);
        }
    }
    if let Some(c) = &r.calibration {
        kv.put("calibration.n", c.n);
        kv.put("calibration.replications", c.ljung_box.replications);
        kv.num("calibration.ljung_box.size", c.ljung_box.rate);
        kv.num("calibration.shapiro_wilk.size", c.shapiro_wilk.rate);
    }

    for row in &r.evaluation.rows {
        let key = row.model.key();
        kv.put(&format!("metrics.{key}.params"), &row.params);
        kv.num(&format!("metrics.{key}.rmse"), row.rmse);
        kv.num(&format!("metrics.{key}.mae"), row.mae);
        kv.num(&format!("metrics.{key}.mape_percent"), row.mape_percent);
        kv.put(&format!("holdout.{key}"), join(row.forecast.values()));
    }
    kv.put(
        "holdout.years",
        r.test
            .years()
            .map(|y| y.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );

    if let Some((_, _, first)) = r.future.first() {
        kv.put(
            "forecast.years",
            first
                .years()
                .map(|y| y.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
    }
    for (model, _, f) in &r.future {
        kv.put(&format!("forecast.{}", model.key()), join(f.values()));
    }

    for (stage, year) in &r.fit_access {
        kv.put(&format!("isolation.{stage}.last_year"), year);
    }
    for (i, f) in r.failures.iter().enumerate() {
        kv.put(
            &format!("failure.{i}"),
            format!("{}: {}", f.stage, f.message),
        );
    }
    kv.0
}

/// Parses `key = value` lines back into a map.
pub fn parse_kv(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

/// Residual checks pass when the null (white noise, normality,
/// stationarity) is not rejected.
fn decision(r: &Result<TestResult, String>) -> String {
    match r {
        Ok(t) => {
            let verdict = if t.reject_at_005 { "fail" } else { "pass" };
            format!("{:.4} | {} | {verdict}", t.statistic, t.p_display())
        }
        Err(e) => format!("- | - | {e}"),
    }
}

pub fn render_markdown(r: &RunResults) -> String {
    let mut md = String::new();
    let _ = writeln!(md, "# Forecast evaluation\n");
    let _ = writeln!(
        md,
        "Training span {}-{} ({} years), test span {}-{} ({} years).\n",
        r.train.start_year(),
        r.train.end_year(),
        r.train.len(),
        r.test.start_year(),
        r.test.end_year(),
        r.test.len()
    );
    let _ = writeln!(md, "| Model | Parameter Estimates | RMSE | MAE | MAPE |");
    let _ = writeln!(md, "|---|---|---|---|---|");
    for row in &r.evaluation.rows {
        let _ = writeln!(
            md,
            "| {} | {} | {} | {} | {} |",
            row.model,
            row.params,
            fmt_metric(row.rmse),
            fmt_metric(row.mae),
            fmt_metric(row.mape_percent)
        );
    }

    if let Some(choice) = &r.differencing {
        let _ = writeln!(md, "\n## Differencing\n");
        let _ = writeln!(md, "| d | ADF statistic | p-value | Lags | Unit root |");
        let _ = writeln!(md, "|---|---|---|---|---|");
        for (d, t) in choice.adf.iter().enumerate() {
            let _ = writeln!(
                md,
                "| {d} | {:.4} | {} | {} | {} |",
                t.statistic,
                t.p_display(),
                t.lags_used,
                if t.reject_at_005 {
                    "rejected"
                } else {
                    "not rejected"
                }
            );
        }
        if choice.degenerate {
            let _ = writeln!(
                md,
                "\nThe series has no variation left at d = {}.",
                choice.d
            );
        }
        if let Some(d) = r.d {
            let how = if r.config.fix_d.is_some() {
                "fixed"
            } else {
                "selected"
            };
            let _ = writeln!(md, "\nDifferencing order {how}: d = {d}.");
        }
    }

    if let Some(search) = &r.search {
        let _ = writeln!(md, "\n## ARIMA order search\n");
        let _ = writeln!(md, "| Order | AIC |");
        let _ = writeln!(md, "|---|---|");
        for fit in &search.ranked {
            let _ = writeln!(md, "| {} | {:.3} |", fit.order, fit.aic);
        }
        for s in &search.skipped {
            let _ = writeln!(md, "| {} | skipped: {} |", s.order, s.reason);
        }
        let best = search.best();
        let coeffs: Vec<String> = best
            .ar_coeffs
            .iter()
            .enumerate()
            .map(|(i, v)| format!("φ{} = {v:.4}", i + 1))
            .chain(
                best.ma_coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, v)| format!("θ{} = {v:.4}", i + 1)),
            )
            .collect();
        let _ = writeln!(
            md,
            "\nSelected ARIMA{}: {}σ² = {:.4}, log-likelihood {:.3}.",
            best.order,
            if coeffs.is_empty() {
                String::new()
            } else {
                coeffs.join(", ") + ", "
            },
            best.sigma2,
            best.log_likelihood
        );
    }

    if !r.diagnostics.is_empty() {
        let _ = writeln!(md, "\n## Residual diagnostics\n");
        let _ = writeln!(
            md,
            "| Model | Test | Statistic | p-value | Decision at 0.05 |"
        );
        let _ = writeln!(md, "|---|---|---|---|---|");
        for diag in &r.diagnostics {
            for (kind, result) in &diag.tests {
                let _ = writeln!(md, "| {} | {kind} | {} |", diag.model, decision(result));
            }
        }
        if let Some(c) = &r.calibration {
            let _ = writeln!(
                md,
                "\nEmpirical size on {} Gaussian samples of length {}: Ljung-Box {:.3}, Shapiro-Wilk {:.3}.",
                c.ljung_box.replications, c.n, c.ljung_box.rate, c.shapiro_wilk.rate
            );
        }
    }

    if !r.future.is_empty() {
        let _ = writeln!(md, "\n## Forecast\n");
        let header: Vec<String> = r.future.iter().map(|f| f.0.to_string()).collect();
        let _ = writeln!(md, "| Year | {} |", header.join(" | "));
        let _ = writeln!(md, "|---|{}", "---|".repeat(header.len()));
        let first = &r.future[0].2;
        for (i, year) in first.years().enumerate() {
            let cells: Vec<String> = r
                .future
                .iter()
                .map(|f| format!("{:.2}", f.2.values()[i]))
                .collect();
            let _ = writeln!(md, "| {year} | {} |", cells.join(" | "));
        }
    }

    if !r.failures.is_empty() {
        let _ = writeln!(md, "\n## Failures\n");
        for f in &r.failures {
            let _ = writeln!(md, "- {}: {}", f.stage, f.message);
        }
    }
    md
}

/// Writes through a temporary file in `dir`, then renames over `name`.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, PipelineError> {
    let target = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| PipelineError::io(dir, e))?;
    tmp.write_all(bytes)
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| PipelineError::io(&target, e))?;
    tmp.persist(&target)
        .map_err(|e| PipelineError::io(&target, e.error))?;
    Ok(target)
}
