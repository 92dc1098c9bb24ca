//! CSV ingestion, the end-to-end forecasting run, and its report, results
//! file and SVG plots.

pub mod config;
pub mod error;
pub mod input;
pub mod pipeline;
pub mod report;
pub mod svg;

pub use config::RunConfig;
pub use error::{InputError, PipelineError};
pub use input::{load_csv, parse_csv};
pub use pipeline::{emit, execute, run_pipeline, RunResults};
