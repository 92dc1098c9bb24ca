//! Self-contained SVG line charts. Coordinates are printed with two
//! decimals, so the same data always gives the same bytes.

use std::fmt::Write as _;

use forecast_core::diagnostics::autocorrelations;
use forecast_core::{Forecast, TimeSeries};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("cannot plot {what}: {reason}")]
pub struct PlotError {
    pub what: String,
    pub reason: String,
}

const WIDTH: f64 = 760.0;
const PANEL_HEIGHT: f64 = 320.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 48.0;

const OBSERVED: &str = "#222222";
const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub struct Line {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub color: &'static str,
    pub dashed: bool,
}

impl Line {
    fn from_years(label: &str, first_year: i32, values: &[f64], color: &'static str) -> Self {
        Line {
            label: label.to_string(),
            points: values
                .iter()
                .enumerate()
                .map(|(i, v)| ((first_year + i as i32) as f64, *v))
                .collect(),
            color,
            dashed: false,
        }
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

/// Round tick steps: 1, 2, 2.5 or 5 times a power of ten.
fn tick_step(span: f64, target: usize) -> f64 {
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let unit = [1.0, 2.0, 2.5, 5.0, 10.0]
        .into_iter()
        .find(|m| m * mag >= raw)
        .unwrap_or(10.0);
    unit * mag
}

fn ticks(lo: f64, hi: f64, target: usize) -> (Vec<f64>, f64) {
    let step = tick_step(hi - lo, target);
    let mut out = Vec::new();
    let mut k = (lo / step).ceil();
    while k * step <= hi + step * 1e-9 {
        out.push(k * step);
        k += 1.0;
    }
    (out, step)
}

fn tick_label(v: f64, step: f64) -> String {
    let mut decimals = 0;
    while decimals < 6 {
        let scaled = step * 10f64.powi(decimals as i32);
        if (scaled - scaled.round()).abs() < 1e-9 {
            break;
        }
        decimals += 1;
    }
    let s = format!("{v:.decimals$}");
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

/// Widens a degenerate or tight range and adds a little headroom.
fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi - lo <= 1e-12 * lo.abs().max(hi.abs()).max(1.0) {
        let pad = (lo.abs() * 0.1).max(1.0);
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

struct Panel {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    x: (f64, f64),
    y: (f64, f64),
}

impl Panel {
    fn new(top: f64, x: (f64, f64), y: (f64, f64)) -> Self {
        Panel {
            left: MARGIN_LEFT,
            top: top + MARGIN_TOP,
            width: WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
            height: PANEL_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM,
            x,
            y,
        }
    }

    fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x.0) / (self.x.1 - self.x.0) * self.width
    }

    fn py(&self, y: f64) -> f64 {
        self.top + self.height - (y - self.y.0) / (self.y.1 - self.y.0) * self.height
    }

    fn bottom(&self) -> f64 {
        self.top + self.height
    }

    fn frame(&self, svg: &mut String, title: &str, x_label: &str, y_label: &str, year_axis: bool) {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">{}</text>"#,
            num(self.left + self.width / 2.0),
            num(self.top - 14.0),
            escape(title)
        );
        let (yt, ystep) = ticks(self.y.0, self.y.1, 6);
        for v in yt {
            let y = self.py(v);
            let _ = writeln!(
                svg,
                r##"<line x1="{l}" y1="{y}" x2="{r}" y2="{y}" stroke="#e5e5e5"/><text x="{tx}" y="{ty}" text-anchor="end">{label}</text>"##,
                l = num(self.left),
                r = num(self.left + self.width),
                y = num(y),
                tx = num(self.left - 6.0),
                ty = num(y + 4.0),
                label = tick_label(v, ystep)
            );
        }
        let (xt, xstep) = if year_axis {
            (year_ticks(self.x.0, self.x.1), 1.0)
        } else {
            ticks(self.x.0, self.x.1, 8)
        };
        for v in xt {
            let x = self.px(v);
            let _ = writeln!(
                svg,
                r##"<line x1="{x}" y1="{b}" x2="{x}" y2="{b5}" stroke="#444444"/><text x="{x}" y="{ty}" text-anchor="middle">{label}</text>"##,
                x = num(x),
                b = num(self.bottom()),
                b5 = num(self.bottom() + 5.0),
                ty = num(self.bottom() + 18.0),
                label = tick_label(v, xstep)
            );
        }
        let _ = writeln!(
            svg,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#444444"/>"##,
            num(self.left),
            num(self.top),
            num(self.width),
            num(self.height)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            num(self.left + self.width / 2.0),
            num(self.bottom() + 38.0),
            escape(x_label)
        );
        let cy = self.top + self.height / 2.0;
        let _ = writeln!(
            svg,
            r#"<text x="16" y="{cy}" text-anchor="middle" transform="rotate(-90 16 {cy})">{}</text>"#,
            escape(y_label),
            cy = num(cy)
        );
    }

    fn line(&self, svg: &mut String, line: &Line) {
        let mut d = String::new();
        for (i, (x, y)) in line.points.iter().enumerate() {
            let _ = write!(
                d,
                "{}{} {}",
                if i == 0 { "M" } else { " L" },
                num(self.px(*x)),
                num(self.py(*y))
            );
        }
        let dash = if line.dashed {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        let _ = writeln!(
            svg,
            r#"<path d="{d}" fill="none" stroke="{}" stroke-width="1.8"{dash}/>"#,
            line.color
        );
    }

    fn legend(&self, svg: &mut String, lines: &[Line]) {
        for (i, line) in lines.iter().enumerate() {
            let y = self.top + 14.0 + 16.0 * i as f64;
            let x = self.left + 10.0;
            let dash = if line.dashed {
                r#" stroke-dasharray="6 4""#
            } else {
                ""
            };
            let _ = writeln!(
                svg,
                r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="2"{dash}/><text x="{}" y="{}">{}</text>"#,
                num(x),
                num(x + 22.0),
                line.color,
                num(x + 28.0),
                num(y + 4.0),
                escape(&line.label),
                y = num(y)
            );
        }
    }
}

/// Year ticks on a round step; the last year is always labeled.
fn year_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let step = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0]
        .into_iter()
        .find(|s| span / s <= 12.0)
        .unwrap_or(100.0);
    let mut out = Vec::new();
    let mut v = (lo / step).ceil() * step;
    while v <= hi {
        out.push(v);
        v += step;
    }
    if out.last().is_none_or(|last| hi - last >= step * 0.4) {
        out.push(hi);
    } else if let Some(last) = out.last_mut() {
        *last = hi;
    }
    out
}

fn open(height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
        w = WIDTH,
        h = height
    )
}

fn bounds(lines: &[Line]) -> ((f64, f64), (f64, f64)) {
    let pts = lines.iter().flat_map(|l| l.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for (x, y) in pts {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    ((x0, x1), (y0, y1))
}

fn require_points(what: &str, n: usize) -> Result<(), PlotError> {
    if n < 2 {
        return Err(PlotError {
            what: what.to_string(),
            reason: format!("needs at least 2 points, got {n}"),
        });
    }
    Ok(())
}

/// Year-indexed line chart with an optional shaded region from `shade_from`
/// to the right edge.
pub fn line_chart(
    title: &str,
    y_label: &str,
    lines: &[Line],
    shade_from: Option<f64>,
    split_at: Option<f64>,
) -> Result<String, PlotError> {
    require_points(
        title,
        lines.iter().map(|l| l.points.len()).max().unwrap_or(0),
    )?;
    let ((x0, x1), (y0, y1)) = bounds(lines);
    if x1.is_nan() || x0.is_nan() || x1 <= x0 {
        return Err(PlotError {
            what: title.to_string(),
            reason: "x range is a single point".into(),
        });
    }
    let panel = Panel::new(0.0, (x0, x1), padded(y0, y1));
    let mut svg = open(PANEL_HEIGHT);
    if let Some(from) = shade_from {
        let _ = writeln!(
            svg,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="#fde9c9" opacity="0.7"/>"##,
            num(panel.px(from)),
            num(panel.top),
            num(panel.px(x1) - panel.px(from)),
            num(panel.height)
        );
    }
    panel.frame(&mut svg, title, "Year", y_label, true);
    if let Some(at) = split_at {
        let _ = writeln!(
            svg,
            r##"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="#888888" stroke-dasharray="2 3"/>"##,
            num(panel.top),
            num(panel.bottom()),
            x = num(panel.px(at))
        );
    }
    for line in lines {
        panel.line(&mut svg, line);
    }
    panel.legend(&mut svg, lines);
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn observed(series: &TimeSeries) -> Result<String, PlotError> {
    line_chart(
        "Observed rate",
        "Rate per 100,000",
        &[Line::from_years(
            "Observed",
            series.start_year(),
            series.values(),
            OBSERVED,
        )],
        None,
        None,
    )
}

/// Observed series with in-sample fitted values and the holdout forecast.
pub fn fitted_vs_observed(
    observed: &TimeSeries,
    fitted: &TimeSeries,
    holdout: &Forecast,
    label: &str,
) -> Result<String, PlotError> {
    let mut holdout_line = Line::from_years(
        &format!("{label} holdout forecast"),
        holdout.first_year(),
        holdout.values(),
        PALETTE[1],
    );
    holdout_line.dashed = true;
    line_chart(
        &format!("Observed and fitted values, {label}"),
        "Rate per 100,000",
        &[
            Line::from_years(
                "Observed",
                observed.start_year(),
                observed.values(),
                OBSERVED,
            ),
            Line::from_years(
                &format!("{label} fitted"),
                fitted.start_year(),
                fitted.values(),
                PALETTE[0],
            ),
            holdout_line,
        ],
        None,
        Some(holdout.first_year() as f64 - 0.5),
    )
}

/// Observed series followed by each forecast, joined at the last
/// observation; the forecast years are shaded.
pub fn forecast(observed: &TimeSeries, forecasts: &[&Forecast]) -> Result<String, PlotError> {
    let mut lines = vec![Line::from_years(
        "Observed",
        observed.start_year(),
        observed.values(),
        OBSERVED,
    )];
    let anchor = (observed.end_year() as f64, observed.last());
    for (i, f) in forecasts.iter().enumerate() {
        let mut line = Line::from_years(
            f.source(),
            f.first_year(),
            f.values(),
            PALETTE[i % PALETTE.len()],
        );
        if f.first_year() == observed.end_year() + 1 {
            line.points.insert(0, anchor);
        }
        line.dashed = i > 0;
        lines.push(line);
    }
    let last = forecasts.iter().map(|f| f.last_year()).max();
    line_chart(
        &match last {
            Some(last) => format!("Forecast {}-{last}", observed.end_year() + 1),
            None => "Forecast".into(),
        },
        "Rate per 100,000",
        &lines,
        last.map(|_| observed.end_year() as f64),
        None,
    )
}

/// Residual series, its ACF with a ±1.96/√n band, and a normal Q-Q plot.
pub fn residual_panel(
    model: &str,
    first_year: i32,
    residuals: &[f64],
) -> Result<String, PlotError> {
    let n = residuals.len();
    require_points(&format!("{model} residuals"), n)?;
    let mut svg = open(3.0 * PANEL_HEIGHT);

    let series = Line::from_years("Residuals", first_year, residuals, PALETTE[0]);
    let ((x0, x1), (y0, y1)) = bounds(std::slice::from_ref(&series));
    let top = Panel::new(0.0, (x0, x1), padded(y0.min(0.0), y1.max(0.0)));
    top.frame(
        &mut svg,
        &format!("{model} residuals"),
        "Year",
        "Residual",
        true,
    );
    let zero = Line {
        label: String::new(),
        points: vec![(x0, 0.0), (x1, 0.0)],
        color: "#888888",
        dashed: true,
    };
    top.line(&mut svg, &zero);
    top.line(&mut svg, &series);

    let max_lag = (n - 1).min(20);
    let band = 1.96 / (n as f64).sqrt();
    let acf = autocorrelations(residuals, max_lag).ok();
    let (lo, hi) = acf.as_ref().map_or((-band, band), |r| {
        r.iter()
            .fold((-band, band), |(lo, hi), v| (lo.min(*v), hi.max(*v)))
    });
    let mid = Panel::new(
        PANEL_HEIGHT,
        (0.0, max_lag as f64 + 1.0),
        padded(lo.min(-band), hi.max(band)),
    );
    mid.frame(&mut svg, "Autocorrelation", "Lag", "ACF", false);
    for y in [band, -band] {
        let _ = writeln!(
            svg,
            r##"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="#1f77b4" stroke-dasharray="5 4"/>"##,
            num(mid.left),
            num(mid.left + mid.width),
            y = num(mid.py(y))
        );
    }
    match &acf {
        Some(r) => {
            for (lag, v) in r.iter().enumerate().skip(1) {
                let x = mid.px(lag as f64);
                let _ = writeln!(
                    svg,
                    r##"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="#222222" stroke-width="3"/>"##,
                    num(mid.py(0.0)),
                    num(mid.py(*v)),
                    x = num(x)
                );
            }
        }
        None => {
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" text-anchor="middle">undefined for a constant series</text>"#,
                num(mid.left + mid.width / 2.0),
                num(mid.top + mid.height / 2.0)
            );
        }
    }

    let mut sorted = residuals.to_vec();
    sorted.sort_by(f64::total_cmp);
    let norm = Normal::standard();
    let theory: Vec<f64> = (1..=n)
        .map(|i| norm.inverse_cdf((i as f64 - 0.375) / (n as f64 + 0.25)))
        .collect();
    let mean = residuals.iter().sum::<f64>() / n as f64;
    let sd = (residuals.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    let tq = (theory[0], theory[n - 1]);
    let ys = (
        sorted[0].min(mean + sd * tq.0),
        sorted[n - 1].max(mean + sd * tq.1),
    );
    let bottom = Panel::new(2.0 * PANEL_HEIGHT, padded(tq.0, tq.1), padded(ys.0, ys.1));
    bottom.frame(
        &mut svg,
        "Normal Q-Q",
        "Theoretical quantile",
        "Sample quantile",
        false,
    );
    let reference = Line {
        label: String::new(),
        points: vec![(tq.0, mean + sd * tq.0), (tq.1, mean + sd * tq.1)],
        color: "#d62728",
        dashed: true,
    };
    bottom.line(&mut svg, &reference);
    for (x, y) in theory.iter().zip(&sorted) {
        let _ = writeln!(
            svg,
            r##"<circle cx="{}" cy="{}" r="3" fill="none" stroke="#1f77b4"/>"##,
            num(bottom.px(*x)),
            num(bottom.py(*y))
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
