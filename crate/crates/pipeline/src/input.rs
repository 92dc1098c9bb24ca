//! `year,rate` CSV ingestion.

use std::path::Path;

use forecast_core::TimeSeries;

use crate::error::InputError;

pub fn load_csv(path: &Path) -> Result<TimeSeries, InputError> {
    let name = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|e| InputError::Read {
        path: name.clone(),
        message: e.to_string(),
    })?;
    parse_csv(&bytes, &name)
}

/// Parses CSV text; `name` labels error messages.
pub fn parse_csv(bytes: &[u8], name: &str) -> Result<TimeSeries, InputError> {
    let schema = |line: u64, message: String| InputError::Schema {
        path: name.to_string(),
        line,
        message,
    };
    if bytes.iter().all(|b| b.is_ascii_whitespace()) {
        return Err(InputError::Empty {
            path: name.to_string(),
        });
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);

    let header = reader
        .headers()
        .map_err(|e| schema(1, e.to_string()))?
        .clone();
    let bom_free: Vec<&str> = header
        .iter()
        .map(|h| h.trim_start_matches('\u{feff}'))
        .collect();
    if bom_free != ["year", "rate"] {
        return Err(schema(
            1,
            format!(
                "expected header `year,rate`, found `{}`",
                bom_free.join(",")
            ),
        ));
    }

    let mut start_year = None;
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| line_at(bytes, p));
            schema(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| line_at(bytes, p));
        if record.iter().all(str::is_empty) {
            continue;
        }
        let year: i32 = record[0].parse().map_err(|_| InputError::Parse {
            path: name.to_string(),
            line,
            field: "year",
            value: record[0].to_string(),
        })?;
        let rate: f64 = record[1].parse().map_err(|_| InputError::Parse {
            path: name.to_string(),
            line,
            field: "rate",
            value: record[1].to_string(),
        })?;
        if !rate.is_finite() || rate <= 0.0 {
            return Err(schema(
                line,
                format!("rate must be finite and positive, got {rate}"),
            ));
        }
        let start = *start_year.get_or_insert(year);
        let expected = start + values.len() as i32;
        if year != expected {
            let message = if year < expected {
                format!("year {year} is duplicated or out of order (expected {expected})")
            } else if year == expected + 1 {
                format!("missing year {expected}")
            } else {
                format!("missing years {expected}-{}", year - 1)
            };
            return Err(schema(line, message));
        }
        values.push(rate);
    }
    let Some(start) = start_year else {
        return Err(InputError::Empty {
            path: name.to_string(),
        });
    };
    TimeSeries::new(start, values).map_err(|e| schema(0, e.to_string()))
}

/// 1-based line of a record start, counted from its byte offset (the csv
/// crate's line counter lags by one after CRLF).
fn line_at(bytes: &[u8], pos: &csv::Position) -> u64 {
    let mut at = (pos.byte() as usize).min(bytes.len());
    while at < bytes.len() && matches!(bytes[at], b'\r' | b'\n') {
        at += 1;
    }
    bytes[..at].iter().filter(|&&b| b == b'\n').count() as u64 + 1
}
