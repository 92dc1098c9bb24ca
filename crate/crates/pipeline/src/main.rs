use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use forecast_core::diagnostics::{acf, adf_test, kpss_test, pacf, LagSelection};
use forecast_core::series::difference_values;
use forecast_pipeline::config::{config_value, parse_exec, parse_models, read_config_file};
use forecast_pipeline::{load_csv, run_pipeline, PipelineError, RunConfig};

#[derive(Parser)]
#[command(
    name = "forecast",
    about = "Annual rate forecasting with ARIMA, SES and Holt smoothing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit, evaluate on the holdout, forecast, and write the report.
    Run(RunArgs),
    /// Print stationarity tests and correlograms for a series.
    Diagnose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        d_max: usize,
    },
    Version,
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    /// Last training year; later years form the holdout.
    #[arg(long)]
    train_end: Option<i32>,
    #[arg(long)]
    horizon: Option<usize>,
    /// Comma-separated subset of arima,ses,hdes,ensemble.
    #[arg(long)]
    models: Option<String>,
    #[arg(long)]
    fix_d: Option<usize>,
    #[arg(long)]
    d_max: Option<usize>,
    #[arg(long)]
    p_max: Option<usize>,
    #[arg(long)]
    q_max: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    plots: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// `parallel` (default) or `sequential`.
    #[arg(long)]
    exec: Option<String>,
}

fn build_config(args: RunArgs) -> Result<RunConfig, PipelineError> {
    let file = match &args.config {
        Some(path) => read_config_file(path)?,
        None => Default::default(),
    };
    let input = args
        .input
        .or(config_value::<PathBuf>(&file, "input")?)
        .ok_or_else(|| PipelineError::Config("missing --input".into()))?;
    let train_end = args
        .train_end
        .or(config_value(&file, "train_end")?)
        .ok_or_else(|| PipelineError::Config("missing --train-end".into()))?;
    let mut config = RunConfig::new(input, train_end);
    if let Some(h) = args.horizon.or(config_value(&file, "horizon")?) {
        config.horizon = h;
    }
    if let Some(m) = args.models.or(config_value(&file, "models")?) {
        config.models = parse_models(&m)?;
    }
    config.fix_d = args.fix_d.or(config_value(&file, "fix_d")?);
    if let Some(v) = args.d_max.or(config_value(&file, "d_max")?) {
        config.d_max = v;
    }
    if let Some(v) = args.p_max.or(config_value(&file, "p_max")?) {
        config.p_max = v;
    }
    if let Some(v) = args.q_max.or(config_value(&file, "q_max")?) {
        config.q_max = v;
    }
    if let Some(v) = args.out.or(config_value(&file, "out")?) {
        config.out_dir = v;
    }
    config.plots = args.plots || config_value(&file, "plots")?.unwrap_or(false);
    if let Some(v) = args.seed.or(config_value(&file, "seed")?) {
        config.seed = v;
    }
    if let Some(v) = args.exec.or(config_value(&file, "exec")?) {
        config.exec = parse_exec(&v)?;
    }
    const KNOWN: [&str; 13] = [
        "input",
        "train_end",
        "horizon",
        "models",
        "fix_d",
        "d_max",
        "p_max",
        "q_max",
        "out",
        "plots",
        "seed",
        "exec",
        "config",
    ];
    if let Some(unknown) = file.keys().find(|k| !KNOWN.contains(&k.as_str())) {
        return Err(PipelineError::Config(format!(
            "unknown config key {unknown:?}"
        )));
    }
    config.validate()?;
    Ok(config)
}

fn run(args: RunArgs) -> Result<u8, PipelineError> {
    let config = build_config(args)?;
    let results = run_pipeline(&config)?;
    for row in &results.evaluation.rows {
        println!(
            "{:<10} {:<28} rmse {:.4}  mae {:.4}  mape {:.3}%",
            row.model.to_string(),
            row.params,
            row.rmse,
            row.mae,
            row.mape_percent
        );
    }
    for f in &results.failures {
        eprintln!("{}: {}", f.stage, f.message);
    }
    println!("wrote {}", config.out_dir.display());
    Ok(results.exit_code())
}

fn diagnose(input: PathBuf, d_max: usize) -> Result<u8, PipelineError> {
    let series = load_csv(&input)?;
    println!(
        "{}: {}-{} ({} points)",
        input.display(),
        series.start_year(),
        series.end_year(),
        series.len()
    );
    for d in 0..=d_max {
        let Ok(w) = difference_values(series.values(), d) else {
            break;
        };
        println!("\nd = {d}");
        match adf_test(&w, LagSelection::default()) {
            Ok(t) => println!(
                "  ADF   statistic {:.4}  p {}  lags {}",
                t.statistic,
                t.p_display(),
                t.lags_used
            ),
            Err(e) => println!("  ADF   {e}"),
        }
        match kpss_test(&w) {
            Ok(t) => println!(
                "  KPSS  statistic {:.4}  p {}  bandwidth {}",
                t.statistic,
                t.p_display(),
                t.lags_used
            ),
            Err(e) => println!("  KPSS  {e}"),
        }
        let lags = (w.len() / 4).clamp(1, 10);
        if let (Ok(a), Ok(p)) = (acf(&w, lags), pacf(&w, lags)) {
            println!("  lag     acf    pacf");
            for (x, y) in a.iter().zip(&p) {
                let flag = if x.value.abs() > x.conf_bound {
                    "*"
                } else {
                    " "
                };
                println!("  {:>3} {:>7.3}{flag} {:>7.3}", x.lag, x.value, y.value);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(args),
        Command::Diagnose { input, d_max } => diagnose(input, d_max),
        Command::Version => {
            println!("forecast {}", env!("CARGO_PKG_VERSION"));
            Ok(0)
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
