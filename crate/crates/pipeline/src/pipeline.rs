//! End-to-end run: load, pick d, search ARIMA orders, fit the smoothing
//! models, check residuals, score the holdout, forecast ahead, write files.

use std::path::PathBuf;

use forecast_core::arima::{
    arima_fit_with, arima_fitted, arima_order_search_with, select_differencing, ArimaOptions,
    DifferencingChoice, OrderSearch,
};
use forecast_core::diagnostics::calibration::{rejection_rate, RejectionRate};
use forecast_core::diagnostics::{
    default_ljung_box_lags, kpss_test, ljung_box, shapiro_wilk, TestKind, TestResult,
};
use forecast_core::ensemble::{
    forecast_models, score_models, ArimaSelection, ArimaSelectionOutcome, EvaluationReport,
    FittedModels, ModelKind, ModelSet,
};
use forecast_core::smoothing::{hdes_fit_with, ses_fit_with};
use forecast_core::{simulate, Forecast, TimeSeries};

use crate::config::RunConfig;
use crate::error::PipelineError;
use crate::input::load_csv;
use crate::report::{render_kv, render_markdown, write_atomic};
use crate::svg;

pub const CALIBRATION_REPLICATIONS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct StageFailure {
    pub stage: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelDiagnostics {
    pub model: ModelKind,
    /// Year of the first residual tested.
    pub first_year: i32,
    pub residuals: Vec<f64>,
    pub tests: Vec<(TestKind, Result<TestResult, String>)>,
}

impl ModelDiagnostics {
    pub fn test(&self, kind: TestKind) -> Option<&Result<TestResult, String>> {
        self.tests.iter().find(|t| t.0 == kind).map(|t| &t.1)
    }
}

/// Empirical size of the residual tests on Gaussian noise of the tested
/// length.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub n: usize,
    pub ljung_box: RejectionRate,
    pub shapiro_wilk: RejectionRate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResults {
    pub config: RunConfig,
    pub series: TimeSeries,
    pub train: TimeSeries,
    pub test: TimeSeries,
    pub d: Option<usize>,
    pub differencing: Option<DifferencingChoice>,
    pub search: Option<OrderSearch>,
    pub evaluation: EvaluationReport,
    pub diagnostics: Vec<ModelDiagnostics>,
    pub calibration: Option<Calibration>,
    /// Fits on the full series, forecasting `horizon` years past its end.
    pub future: Vec<(ModelKind, String, Forecast)>,
    /// Last year of data handed to each fitting stage.
    pub fit_access: Vec<(&'static str, i32)>,
    pub failures: Vec<StageFailure>,
}

impl RunResults {
    pub fn future_forecast(&self, model: ModelKind) -> Option<&Forecast> {
        self.future.iter().find(|f| f.0 == model).map(|f| &f.2)
    }

    pub fn diagnostics_for(&self, model: ModelKind) -> Option<&ModelDiagnostics> {
        self.diagnostics.iter().find(|d| d.model == model)
    }

    /// 0 when every mandatory stage succeeded, 3 otherwise.
    pub fn exit_code(&self) -> u8 {
        if self.failures.is_empty() {
            0
        } else {
            3
        }
    }
}

struct Access(Vec<(&'static str, i32)>);

impl Access {
    fn see<'a>(&mut self, stage: &'static str, s: &'a TimeSeries) -> &'a TimeSeries {
        match self.0.iter_mut().find(|a| a.0 == stage) {
            Some(entry) => entry.1 = entry.1.max(s.end_year()),
            None => self.0.push((stage, s.end_year())),
        }
        s
    }
}

fn model_set(config: &RunConfig, d: usize) -> ModelSet {
    ModelSet {
        models: config.models.clone(),
        arima: ArimaSelection::Search {
            fixed_d: Some(d),
            d_max: config.d_max,
            p_max: config.p_max,
            q_max: config.q_max,
        },
        arima_options: ArimaOptions::default(),
        exec: config.exec,
    }
}

fn run_tests(
    residuals: &[f64],
    lb_params: usize,
    with_kpss: bool,
) -> Vec<(TestKind, Result<TestResult, String>)> {
    let lags = default_ljung_box_lags(residuals.len());
    let mut tests = vec![
        (
            TestKind::LjungBox,
            ljung_box(residuals, lags, lb_params).map_err(|e| e.to_string()),
        ),
        (
            TestKind::ShapiroWilk,
            shapiro_wilk(residuals).map_err(|e| e.to_string()),
        ),
    ];
    if with_kpss {
        tests.push((
            TestKind::Kpss,
            kpss_test(residuals).map_err(|e| e.to_string()),
        ));
    }
    tests
}

/// Runs every stage on an already loaded series; nothing touches the disk.
pub fn execute(config: &RunConfig, series: TimeSeries) -> Result<RunResults, PipelineError> {
    config.validate()?;
    let (train, test) = series
        .split_at(config.train_end)
        .map_err(|e| PipelineError::Config(format!("train_end {}: {e}", config.train_end)))?;
    let mut failures = Vec::new();
    let mut access = Access(Vec::new());
    let wants = |k: ModelKind| config.models.contains(&k);
    let needs_arima = wants(ModelKind::Arima) || wants(ModelKind::HdesArima);
    let needs_hdes = wants(ModelKind::Hdes) || wants(ModelKind::HdesArima);
    let mut fits = FittedModels::default();

    // stationarity
    let mut differencing = None;
    let mut d = config.fix_d;
    if needs_arima {
        match select_differencing(access.see("stationarity", &train).values(), config.d_max) {
            Ok(choice) => {
                d = d.or(Some(choice.d));
                differencing = Some(choice);
            }
            Err(e) if d.is_none() => failures.push(StageFailure {
                stage: "stationarity",
                message: e.to_string(),
            }),
            Err(_) => {}
        }
    }

    // order search
    let mut search = None;
    if let (true, Some(d)) = (needs_arima, d) {
        let set = model_set(config, d);
        match arima_order_search_with(
            access.see("order-search", &train),
            d,
            config.p_max,
            config.q_max,
            &set.arima_options,
            config.exec,
        ) {
            Ok(s) => {
                fits.arima = Some(ArimaSelectionOutcome {
                    fit: s.best().clone(),
                    differencing: differencing.clone(),
                    search: Some(s.clone()),
                });
                search = Some(s);
            }
            Err(e) => {
                failures.push(StageFailure {
                    stage: "order-search",
                    message: e.to_string(),
                });
                fits.failures.push((ModelKind::Arima, e.to_string()));
            }
        }
    } else if needs_arima {
        fits.failures
            .push((ModelKind::Arima, "no differencing order available".into()));
    }

    // smoothing
    if wants(ModelKind::Ses) {
        match ses_fit_with(access.see("smoothing", &train), config.exec) {
            Ok(f) => fits.ses = Some(f),
            Err(e) => {
                failures.push(StageFailure {
                    stage: "smoothing",
                    message: format!("SES: {e}"),
                });
                fits.failures.push((ModelKind::Ses, e.to_string()));
            }
        }
    }
    if needs_hdes {
        match hdes_fit_with(access.see("smoothing", &train), config.exec) {
            Ok(f) => fits.hdes = Some(f),
            Err(e) => {
                failures.push(StageFailure {
                    stage: "smoothing",
                    message: format!("HDES: {e}"),
                });
                fits.failures.push((ModelKind::Hdes, e.to_string()));
            }
        }
    }

    // residual diagnostics; structural leading zeros of the smoothing
    // residuals are left out
    let mut diagnostics = Vec::new();
    if let Some(sel) = &fits.arima {
        let f = &sel.fit;
        diagnostics.push(ModelDiagnostics {
            model: ModelKind::Arima,
            first_year: train.start_year() + f.order.d as i32,
            residuals: f.residuals.clone(),
            tests: run_tests(&f.residuals, f.n_arma_params(), true),
        });
    }
    if let Some(f) = &fits.ses {
        let r = f.residuals[1..].to_vec();
        diagnostics.push(ModelDiagnostics {
            model: ModelKind::Ses,
            first_year: train.start_year() + 1,
            tests: run_tests(&r, 0, false),
            residuals: r,
        });
    }
    if let Some(f) = &fits.hdes {
        let r = f.residuals[2..].to_vec();
        diagnostics.push(ModelDiagnostics {
            model: ModelKind::Hdes,
            first_year: train.start_year() + 2,
            tests: run_tests(&r, 0, false),
            residuals: r,
        });
    }
    let calibration = diagnostics.first().map(|first| {
        let n = first.residuals.len();
        let lags = default_ljung_box_lags(n);
        Calibration {
            n,
            ljung_box: rejection_rate(config.exec, CALIBRATION_REPLICATIONS, config.seed, |s| {
                ljung_box(&simulate::normal(n, s), lags, 0)
            }),
            shapiro_wilk: rejection_rate(config.exec, CALIBRATION_REPLICATIONS, config.seed, |s| {
                shapiro_wilk(&simulate::normal(n, s))
            }),
        }
    });

    // holdout evaluation
    let set = model_set(config, d.unwrap_or(0));
    let fit_failed: Vec<ModelKind> = fits.failures.iter().map(|f| f.0).collect();
    let evaluation = score_models(&train, &test, fits, &set)
        .map_err(|e| PipelineError::Config(e.to_string()))?;
    for (model, message) in evaluation
        .failures
        .iter()
        .filter(|f| !fit_failed.contains(&f.0))
    {
        failures.push(StageFailure {
            stage: "evaluation",
            message: format!("{model}: {message}"),
        });
    }

    // refit on the full series for the forecast beyond the data
    let mut full = FittedModels::default();
    let refit = access.see("forecast-refit", &series);
    if let Some(sel) = &evaluation.fits.arima {
        match arima_fit_with(refit, sel.fit.order, &set.arima_options) {
            Ok(fit) => {
                full.arima = Some(ArimaSelectionOutcome {
                    fit,
                    differencing: None,
                    search: None,
                })
            }
            Err(e) => full.failures.push((ModelKind::Arima, e.to_string())),
        }
    }
    if evaluation.fits.ses.is_some() {
        match ses_fit_with(refit, config.exec) {
            Ok(f) => full.ses = Some(f),
            Err(e) => full.failures.push((ModelKind::Ses, e.to_string())),
        }
    }
    if evaluation.fits.hdes.is_some() {
        match hdes_fit_with(refit, config.exec) {
            Ok(f) => full.hdes = Some(f),
            Err(e) => full.failures.push((ModelKind::Hdes, e.to_string())),
        }
    }
    let mut refit_failures = full.failures.clone();
    let evaluated: Vec<ModelKind> = evaluation.rows.iter().map(|r| r.model).collect();
    let future_set = ModelSet {
        models: evaluated,
        ..set
    };
    let future = forecast_models(
        &series,
        &full,
        &future_set,
        config.horizon,
        &mut refit_failures,
    );
    for (model, message) in refit_failures {
        failures.push(StageFailure {
            stage: "forecast",
            message: format!("{model}: {message}"),
        });
    }

    Ok(RunResults {
        config: config.clone(),
        series,
        train,
        test,
        d,
        differencing,
        search,
        evaluation,
        diagnostics,
        calibration,
        future,
        fit_access: access.0,
        failures,
    })
}

/// In-sample one-step predictions on the training span for `model`.
pub fn fitted_values(results: &RunResults, model: ModelKind) -> Option<TimeSeries> {
    let train = &results.train;
    let fits = &results.evaluation.fits;
    let smoothing = |residuals: &[f64], skip: usize| {
        let v: Vec<f64> = train.values()[skip..]
            .iter()
            .zip(&residuals[skip..])
            .map(|(y, e)| y - e)
            .collect();
        TimeSeries::new(train.start_year() + skip as i32, v).ok()
    };
    match model {
        ModelKind::Arima => fits
            .arima
            .as_ref()
            .and_then(|s| arima_fitted(&s.fit, train).ok()),
        ModelKind::Ses => fits.ses.as_ref().and_then(|f| smoothing(&f.residuals, 1)),
        ModelKind::Hdes => fits.hdes.as_ref().and_then(|f| smoothing(&f.residuals, 2)),
        ModelKind::HdesArima => {
            let a = fitted_values(results, ModelKind::Arima)?;
            let h = fitted_values(results, ModelKind::Hdes)?;
            let start = a.start_year().max(h.start_year());
            let av = &a.values()[(start - a.start_year()) as usize..];
            let hv = &h.values()[(start - h.start_year()) as usize..];
            TimeSeries::new(
                start,
                av.iter().zip(hv).map(|(x, y)| 0.5 * (x + y)).collect(),
            )
            .ok()
        }
    }
}

fn plots(results: &RunResults) -> (Vec<(String, String)>, Vec<StageFailure>) {
    let mut files = Vec::new();
    let mut failures = Vec::new();
    let mut add = |name: String, svg: Result<String, svg::PlotError>| match svg {
        Ok(text) => files.push((name, text)),
        Err(e) => failures.push(StageFailure {
            stage: "plots",
            message: e.to_string(),
        }),
    };
    add("observed.svg".into(), svg::observed(&results.series));
    for diag in &results.diagnostics {
        add(
            format!("residuals_{}.svg", diag.model.key()),
            svg::residual_panel(&diag.model.to_string(), diag.first_year, &diag.residuals),
        );
    }
    let featured = [
        ModelKind::HdesArima,
        ModelKind::Arima,
        ModelKind::Hdes,
        ModelKind::Ses,
    ]
    .into_iter()
    .find_map(|k| {
        let row = results.evaluation.row(k)?;
        Some((k, fitted_values(results, k)?, &row.forecast))
    });
    if let Some((kind, fitted, holdout)) = featured {
        add(
            "fitted_vs_observed.svg".into(),
            svg::fitted_vs_observed(&results.series, &fitted, holdout, &kind.to_string()),
        );
    }
    let mut ordered: Vec<&Forecast> = Vec::new();
    for kind in [
        ModelKind::HdesArima,
        ModelKind::Arima,
        ModelKind::Hdes,
        ModelKind::Ses,
    ] {
        if let Some(f) = results.future_forecast(kind) {
            ordered.push(f);
        }
    }
    add(
        "forecast.svg".into(),
        svg::forecast(&results.series, &ordered),
    );
    (files, failures)
}

/// Writes the report, results file and (optionally) plots into
/// `config.out_dir`; returns the paths written.
pub fn emit(results: &mut RunResults) -> Result<Vec<PathBuf>, PipelineError> {
    let dir = results.config.out_dir.clone();
    std::fs::create_dir_all(&dir).map_err(|e| PipelineError::io(&dir, e))?;
    let mut files = Vec::new();
    if results.config.plots {
        let (svgs, plot_failures) = plots(results);
        results.failures.extend(plot_failures);
        files.extend(svgs);
    }
    files.insert(0, ("results.kv".into(), render_kv(results)));
    files.insert(0, ("report.md".into(), render_markdown(results)));
    let mut written = Vec::new();
    for (name, text) in files {
        written.push(write_atomic(&dir, &name, text.as_bytes())?);
    }
    Ok(written)
}

/// Loads the CSV, runs every stage and writes the outputs.
pub fn run_pipeline(config: &RunConfig) -> Result<RunResults, PipelineError> {
    config.validate()?;
    let series = load_csv(&config.input)?;
    let mut results = execute(config, series)?;
    emit(&mut results)?;
    Ok(results)
}
