//! Run configuration and the flat `key = value` config file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use forecast_core::ensemble::ModelKind;
use forecast_core::Exec;

use crate::error::PipelineError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub train_end: i32,
    pub horizon: usize,
    pub models: Vec<ModelKind>,
    /// Pins the differencing order instead of running the ADF loop.
    pub fix_d: Option<usize>,
    pub d_max: usize,
    pub p_max: usize,
    pub q_max: usize,
    pub out_dir: PathBuf,
    pub plots: bool,
    /// Seeds the Monte-Carlo calibration of the residual tests.
    pub seed: u64,
    pub exec: Exec,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, train_end: i32) -> Self {
        Self {
            input: input.into(),
            train_end,
            horizon: 9,
            models: ModelKind::ALL.to_vec(),
            fix_d: None,
            d_max: 2,
            p_max: 3,
            q_max: 3,
            out_dir: PathBuf::from("forecast-out"),
            plots: false,
            seed: 1,
            exec: Exec::default(),
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.horizon == 0 {
            return Err(PipelineError::Config("horizon must be at least 1".into()));
        }
        if self.p_max > 5 || self.q_max > 5 || self.d_max > 5 {
            return Err(PipelineError::Config(
                "p_max, q_max and d_max must be at most 5".into(),
            ));
        }
        if self.fix_d.is_some_and(|d| d > 5) {
            return Err(PipelineError::Config("fix_d must be at most 5".into()));
        }
        Ok(())
    }
}

/// Parses a comma-separated model list such as `arima,hdes`. An empty
/// string selects no models.
pub fn parse_models(list: &str) -> Result<Vec<ModelKind>, PipelineError> {
    let mut models = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let kind = ModelKind::ALL
            .into_iter()
            .find(|k| k.key() == name.to_ascii_lowercase())
            .ok_or_else(|| PipelineError::Config(format!("unknown model {name:?}")))?;
        if !models.contains(&kind) {
            models.push(kind);
        }
    }
    models.sort();
    Ok(models)
}

pub fn parse_exec(name: &str) -> Result<Exec, PipelineError> {
    match name {
        "sequential" => Ok(Exec::Sequential),
        "parallel" => Ok(Exec::Parallel),
        other => Err(PipelineError::Config(format!(
            "exec must be `sequential` or `parallel`, got {other:?}"
        ))),
    }
}

/// `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, PipelineError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            PipelineError::Config(format!("line {}: expected `key = value`", i + 1))
        })?;
        let key = key.trim().replace('-', "_");
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(PipelineError::Config(format!(
                "line {}: duplicate key {key}",
                i + 1
            )));
        }
    }
    Ok(map)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
    parse_config_file(&text)
}

/// Typed lookup into a parsed config file.
pub fn config_value<T: std::str::FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, PipelineError> {
    map.get(key)
        .map(|v| {
            v.parse()
                .map_err(|_| PipelineError::Config(format!("invalid value {v:?} for {key}")))
        })
        .transpose()
}
