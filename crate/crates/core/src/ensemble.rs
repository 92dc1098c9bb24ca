//! Holdout evaluation: accuracy metrics, the equal-weight Holt/ARIMA
//! combination, and a per-model report in a fixed row order.

use std::fmt;

use crate::arima::{
    arima_fit_with, arima_forecast, arima_order_search_with, select_differencing, ArimaFit,
    ArimaOptions, ArimaOrder, DifferencingChoice, OrderSearch,
};
use crate::error::{Error, Result};
use crate::forecast::Forecast;
use crate::par::{map_indices, Exec};
use crate::series::TimeSeries;
use crate::smoothing::{hdes_fit_with, hdes_forecast, ses_fit_with, ses_forecast, HdesFit, SesFit};

fn check_lengths(actual: &[f64], predicted: &[f64]) -> Result<()> {
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: actual.len(),
            right: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(())
}

pub fn rmse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_lengths(actual, predicted)?;
    let mse = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p) * (a - p))
        .sum::<f64>()
        / actual.len() as f64;
    Ok(mse.sqrt())
}

pub fn mae(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_lengths(actual, predicted)?;
    Ok(actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p).abs())
        .sum::<f64>()
        / actual.len() as f64)
}

/// Mean absolute percentage error, in percent.
pub fn mape_percent(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_lengths(actual, predicted)?;
    if let Some(index) = actual.iter().position(|a| *a == 0.0) {
        return Err(Error::ZeroActual { index });
    }
    Ok(100.0
        * actual
            .iter()
            .zip(predicted)
            .map(|(a, p)| ((a - p) / a).abs())
            .sum::<f64>()
        / actual.len() as f64)
}

/// Element-wise mean of two forecasts over the same years.
pub fn average_forecast(a: &Forecast, b: &Forecast) -> Result<Forecast> {
    if a.first_year() != b.first_year() || a.len() != b.len() {
        return Err(Error::Alignment(format!(
            "{} covers {}..={}, {} covers {}..={}",
            a.source(),
            a.first_year(),
            a.last_year(),
            b.source(),
            b.first_year(),
            b.last_year()
        )));
    }
    let values = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| 0.5 * (x + y))
        .collect();
    Forecast::new(
        a.first_year(),
        values,
        format!("{}+{}", a.source(), b.source()),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Arima,
    Ses,
    Hdes,
    HdesArima,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::Arima,
        ModelKind::Ses,
        ModelKind::Hdes,
        ModelKind::HdesArima,
    ];

    /// Short lowercase key used in CLI flags and result files.
    pub fn key(self) -> &'static str {
        match self {
            ModelKind::Arima => "arima",
            ModelKind::Ses => "ses",
            ModelKind::Hdes => "hdes",
            ModelKind::HdesArima => "ensemble",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Arima => "ARIMA",
            ModelKind::Ses => "SES",
            ModelKind::Hdes => "HDES",
            ModelKind::HdesArima => "HDES-ARIMA",
        })
    }
}

/// How the ARIMA order is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArimaSelection {
    Fixed(ArimaOrder),
    /// AIC search over `p ≤ p_max`, `q ≤ q_max`; `d` fixed or picked by the
    /// ADF loop up to `d_max`.
    Search {
        fixed_d: Option<usize>,
        d_max: usize,
        p_max: usize,
        q_max: usize,
    },
}

impl Default for ArimaSelection {
    fn default() -> Self {
        ArimaSelection::Search {
            fixed_d: None,
            d_max: 2,
            p_max: 3,
            q_max: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSet {
    pub models: Vec<ModelKind>,
    pub arima: ArimaSelection,
    pub arima_options: ArimaOptions,
    pub exec: Exec,
}

impl Default for ModelSet {
    fn default() -> Self {
        Self {
            models: ModelKind::ALL.to_vec(),
            arima: ArimaSelection::default(),
            arima_options: ArimaOptions::default(),
            exec: Exec::default(),
        }
    }
}

impl ModelSet {
    pub fn includes(&self, kind: ModelKind) -> bool {
        self.models.contains(&kind)
    }

    fn needs_arima(&self) -> bool {
        self.includes(ModelKind::Arima) || self.includes(ModelKind::HdesArima)
    }

    fn needs_hdes(&self) -> bool {
        self.includes(ModelKind::Hdes) || self.includes(ModelKind::HdesArima)
    }
}

/// ARIMA fit together with how its order was chosen.
#[derive(Debug, Clone, PartialEq)]
pub struct ArimaSelectionOutcome {
    pub fit: ArimaFit,
    pub differencing: Option<DifferencingChoice>,
    pub search: Option<OrderSearch>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FittedModels {
    pub arima: Option<ArimaSelectionOutcome>,
    pub ses: Option<SesFit>,
    pub hdes: Option<HdesFit>,
    /// Models whose fit failed, with the reason.
    pub failures: Vec<(ModelKind, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub model: ModelKind,
    pub params: String,
    pub rmse: f64,
    pub mae: f64,
    pub mape_percent: f64,
    pub forecast: Forecast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub rows: Vec<ReportRow>,
    pub test_span: (i32, i32),
    /// Models that could not be evaluated, with the reason.
    pub failures: Vec<(ModelKind, String)>,
    pub fits: FittedModels,
}

impl EvaluationReport {
    pub fn row(&self, model: ModelKind) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.model == model)
    }
}

/// `decimals` places, widened to four when rounding would print 0 or 1 for
/// a value strictly inside (0, 1).
fn unit_param(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    let collapsed = s.parse::<f64>().is_ok_and(|r| r <= 0.0 || r >= 1.0);
    if collapsed && v > 0.0 && v < 1.0 {
        format!("{v:.4}")
    } else {
        s
    }
}

pub fn ses_summary(fit: &SesFit) -> String {
    format!("α = {}", unit_param(fit.alpha, 3))
}

pub fn hdes_summary(fit: &HdesFit) -> String {
    format!(
        "α = {}, β = {}",
        unit_param(fit.alpha, 2),
        unit_param(fit.beta, 2)
    )
}

pub fn arima_summary(fit: &ArimaFit) -> String {
    fit.order.to_string()
}

/// Fits or searches the ARIMA model on `train` alone.
pub fn select_arima(train: &TimeSeries, set: &ModelSet) -> Result<ArimaSelectionOutcome> {
    match set.arima {
        ArimaSelection::Fixed(order) => Ok(ArimaSelectionOutcome {
            fit: arima_fit_with(train, order, &set.arima_options)?,
            differencing: None,
            search: None,
        }),
        ArimaSelection::Search {
            fixed_d,
            d_max,
            p_max,
            q_max,
        } => {
            let (d, differencing) = match fixed_d {
                Some(d) => (d, None),
                None => {
                    let choice = select_differencing(train.values(), d_max)?;
                    (choice.d, Some(choice))
                }
            };
            let search =
                arima_order_search_with(train, d, p_max, q_max, &set.arima_options, set.exec)?;
            Ok(ArimaSelectionOutcome {
                fit: search.best().clone(),
                differencing,
                search: Some(search),
            })
        }
    }
}

enum Fitted {
    Arima(Result<ArimaSelectionOutcome>),
    Ses(Result<SesFit>),
    Hdes(Result<HdesFit>),
    Skipped,
}

/// Fits every model `set` needs on `train`. The HDES-ARIMA combination
/// pulls in both of its parents.
pub fn fit_models(train: &TimeSeries, set: &ModelSet) -> FittedModels {
    let outcomes = map_indices(set.exec, 3, |task| match task {
        0 if set.needs_arima() => Fitted::Arima(select_arima(train, set)),
        1 if set.includes(ModelKind::Ses) => Fitted::Ses(ses_fit_with(train, set.exec)),
        2 if set.needs_hdes() => Fitted::Hdes(hdes_fit_with(train, set.exec)),
        _ => Fitted::Skipped,
    });
    let mut fits = FittedModels::default();
    for outcome in outcomes {
        match outcome {
            Fitted::Arima(Ok(sel)) => fits.arima = Some(sel),
            Fitted::Ses(Ok(fit)) => fits.ses = Some(fit),
            Fitted::Hdes(Ok(fit)) => fits.hdes = Some(fit),
            Fitted::Arima(Err(e)) => fits.failures.push((ModelKind::Arima, e.to_string())),
            Fitted::Ses(Err(e)) => fits.failures.push((ModelKind::Ses, e.to_string())),
            Fitted::Hdes(Err(e)) => fits.failures.push((ModelKind::Hdes, e.to_string())),
            Fitted::Skipped => {}
        }
    }
    fits
}

/// Forecasts from already fitted models, one per selected model, in row
/// order. Models that cannot forecast are added to `failures`.
pub fn forecast_models(
    train: &TimeSeries,
    fits: &FittedModels,
    set: &ModelSet,
    horizon: usize,
    failures: &mut Vec<(ModelKind, String)>,
) -> Vec<(ModelKind, String, Forecast)> {
    let failed = |kind: ModelKind| fits.failures.iter().any(|f| f.0 == kind);
    let arima = fits
        .arima
        .as_ref()
        .map(|sel| arima_forecast(&sel.fit, train, horizon).map(|f| (arima_summary(&sel.fit), f)));
    let hdes = fits
        .hdes
        .as_ref()
        .map(|fit| hdes_forecast(fit, horizon).map(|f| (hdes_summary(fit), f)));
    let ses = fits
        .ses
        .as_ref()
        .map(|fit| ses_forecast(fit, horizon).map(|f| (ses_summary(fit), f)));

    let mut out = Vec::new();
    for kind in ModelKind::ALL {
        if !set.includes(kind) {
            continue;
        }
        let produced = match kind {
            ModelKind::Arima => arima.clone(),
            ModelKind::Ses => ses.clone(),
            ModelKind::Hdes => hdes.clone(),
            ModelKind::HdesArima => match (&hdes, &arima) {
                (Some(Ok((hp, hf))), Some(Ok((ap, af)))) => {
                    Some(average_forecast(hf, af).map(|f| (format!("{hp}, {ap}"), f)))
                }
                _ => Some(Err(Error::ModelFit {
                    model: kind.to_string(),
                    message: "requires both HDES and ARIMA forecasts".into(),
                })),
            },
        };
        match produced {
            Some(Ok((params, forecast))) => out.push((kind, params, forecast)),
            Some(Err(e)) if kind == ModelKind::HdesArima || !failed(kind) => {
                failures.push((kind, e.to_string()))
            }
            _ => {}
        }
    }
    out
}

/// Scores fitted models against `test`, which must start the year after
/// `train` ends.
pub fn score_models(
    train: &TimeSeries,
    test: &TimeSeries,
    fits: FittedModels,
    set: &ModelSet,
) -> Result<EvaluationReport> {
    if test.start_year() != train.end_year() + 1 {
        return Err(Error::Alignment(format!(
            "test starts in {} but training ends in {}",
            test.start_year(),
            train.end_year()
        )));
    }
    let actual = test.values();
    let mut failures: Vec<(ModelKind, String)> = fits
        .failures
        .iter()
        .filter(|f| set.includes(f.0))
        .cloned()
        .collect();
    let forecasts = forecast_models(train, &fits, set, test.len(), &mut failures);

    let mut rows = Vec::with_capacity(forecasts.len());
    for (model, params, forecast) in forecasts {
        let scored = rmse(actual, forecast.values()).and_then(|r| {
            Ok((
                r,
                mae(actual, forecast.values())?,
                mape_percent(actual, forecast.values())?,
            ))
        });
        match scored {
            Ok((rmse, mae, mape_percent)) => rows.push(ReportRow {
                model,
                params,
                rmse,
                mae,
                mape_percent,
                forecast,
            }),
            Err(e) => failures.push((model, e.to_string())),
        }
    }
    failures.sort_by_key(|(kind, _)| *kind);

    Ok(EvaluationReport {
        rows,
        test_span: (test.start_year(), test.end_year()),
        failures,
        fits,
    })
}

/// Fits every selected model on `train`, forecasts across `test`, and scores
/// the forecasts. Rows come out as ARIMA, SES, HDES, HDES-ARIMA.
pub fn evaluate_models(
    train: &TimeSeries,
    test: &TimeSeries,
    set: &ModelSet,
) -> Result<EvaluationReport> {
    if test.start_year() != train.end_year() + 1 {
        return Err(Error::Alignment(format!(
            "test starts in {} but training ends in {}",
            test.start_year(),
            train.end_year()
        )));
    }
    score_models(train, test, fit_models(train, set), set)
}
