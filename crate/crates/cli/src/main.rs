//! `walloc`: estimate weighted premiums and allocations from CSV data,
//! compute model oracle values and asymptotic variances, and run seeded
//! Monte Carlo experiments.
//!
//! Results go to stdout as JSON. Failures print `{"error": {...}}` to stdout
//! and exit with 2 (config or parse), 3 (data), 4 (math or domain) or
//! 5 (experiment aborted).

mod input;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use walloc::asymptotics::{
    bootstrap_variance, confidence_interval, sigma_sq_oracle, sigma_sq_plugin, IntervalMethod,
    VarianceMethod, DEFAULT_GRID_SIZE, DEFAULT_TRUNCATION,
};
use walloc::distributions::true_premium;
use walloc::empirical::{estimate_premium, estimate_ratio, estimate_simple};
use walloc::montecarlo::run_experiment;
use walloc::{ExperimentConfig, ModelSpec, Variant, WeightSpec};

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            kind: "config",
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            kind: "data",
            message: message.into(),
        }
    }

    /// Any library error raised while building a sample is a data error.
    pub fn bad_data(e: walloc::Error) -> Self {
        Self::data(e.to_string())
    }

    fn to_json(&self) -> Value {
        json!({ "error": { "code": self.code, "kind": self.kind, "message": self.message } })
    }
}

impl From<walloc::Error> for CliError {
    fn from(e: walloc::Error) -> Self {
        use walloc::Error as E;
        let (code, kind) = match e {
            E::InvalidSpec(_) => (2, "config"),
            E::EmptySample | E::SampleTooSmall { .. } => (3, "data"),
            E::ExperimentAborted { .. } => (5, "experiment"),
            E::Domain { .. }
            | E::Divergent(_)
            | E::ZeroDenominator(_)
            | E::Unsupported(_)
            | E::ZeroVariance(_) => (4, "math"),
        };
        Self {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "walloc",
    version,
    about = "Weighted premiums and capital allocations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Ratio,
    Simple,
    Premium,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Ratio => Variant::Ratio,
            VariantArg::Simple => Variant::Simple,
            VariantArg::Premium => Variant::Premium,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Oracle,
    Plugin,
    Bootstrap,
}

impl From<MethodArg> for VarianceMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Oracle => VarianceMethod::Oracle,
            MethodArg::Plugin => VarianceMethod::PlugIn,
            MethodArg::Bootstrap => VarianceMethod::Bootstrap,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Estimate from a CSV sample with header `x,y` (or `x` for the premium).
    Estimate {
        /// CSV file.
        data: PathBuf,
        /// Weight as inline JSON or a path to a JSON file.
        #[arg(long)]
        weight: String,
        #[arg(long, value_enum, default_value = "simple")]
        variant: VariantArg,
        /// Add a confidence interval at this level (simple and premium only).
        #[arg(long)]
        level: Option<f64>,
        /// Variance behind the interval: plugin or bootstrap.
        #[arg(long, value_enum, default_value = "plugin")]
        method: MethodArg,
        /// Bootstrap resamples.
        #[arg(long, default_value_t = 1000)]
        replicates: usize,
        /// Bootstrap seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Oracle value and asymptotic variance for a parametric model.
    TrueValue {
        /// Model as inline JSON or a path to a JSON file.
        #[arg(long)]
        model: String,
        /// Weight as inline JSON or a path to a JSON file.
        #[arg(long)]
        weight: String,
        /// Report the premium of the x marginal instead of the allocation.
        #[arg(long)]
        premium: bool,
        /// Stieltjes grid size for the variance.
        #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
        grid_size: usize,
        /// Endpoint truncation for the variance.
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        truncation: f64,
    },
    /// Asymptotic variance σ² from a model (oracle) or from data (plugin, bootstrap).
    Variance {
        /// Weight as inline JSON or a path to a JSON file.
        #[arg(long)]
        weight: String,
        #[arg(long, value_enum, default_value = "plugin")]
        method: MethodArg,
        /// CSV sample, required for plugin and bootstrap.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Model JSON or path, required for oracle.
        #[arg(long)]
        model: Option<String>,
        /// Bootstrap resamples.
        #[arg(long, default_value_t = 1000)]
        replicates: usize,
        /// Bootstrap seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Stieltjes grid size (oracle).
        #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
        grid_size: usize,
        /// Endpoint truncation (oracle).
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        truncation: f64,
    },
    /// Run a Monte Carlo experiment described by a JSON config; writes
    /// result.json and result.csv into the output directory.
    Simulate {
        /// Experiment config JSON file.
        config: PathBuf,
        /// Output directory, overriding `output_path`.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Overrides `master_seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides `ci_level`.
        #[arg(long)]
        level: Option<f64>,
        /// Overrides `variance_method`.
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// Overrides `grid_size`.
        #[arg(long)]
        grid_size: Option<usize>,
        /// Overrides `truncation`.
        #[arg(long)]
        truncation: Option<f64>,
    },
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(|e| CliError {
        code: 4,
        kind: "math",
        message: e.to_string(),
    })
}

fn load_model(arg: &str) -> Result<ModelSpec, CliError> {
    let model: ModelSpec = input::json_arg("model", arg)?;
    model.validate()?;
    Ok(model)
}

fn cmd_estimate(
    data: PathBuf,
    weight: String,
    variant: Variant,
    level: Option<f64>,
    method: MethodArg,
    replicates: usize,
    seed: u64,
) -> Result<String, CliError> {
    let w: WeightSpec = input::json_arg("weight", &weight)?;
    let sample = input::read_csv(&data)?;
    let report = match (variant, level) {
        (Variant::Ratio, Some(_)) => {
            return Err(CliError::config(
                "intervals are available for simple and premium only",
            ))
        }
        (Variant::Ratio, None) => estimate_ratio(&sample.paired()?, &w)?,
        (Variant::Simple, None) => estimate_simple(&sample.paired()?, &w)?,
        (Variant::Premium, None) => estimate_premium(&sample.xs, &w)?,
        (_, Some(level)) => {
            let interval = match method {
                MethodArg::Plugin => IntervalMethod::PlugIn,
                MethodArg::Bootstrap => IntervalMethod::Bootstrap { replicates },
                MethodArg::Oracle => {
                    return Err(CliError::config(
                        "data intervals use plugin or bootstrap variance",
                    ))
                }
            };
            // The premium is the simple estimator on the self-paired sample.
            let s = if variant == Variant::Premium {
                walloc::PairedSample::self_paired(sample.xs).map_err(CliError::bad_data)?
            } else {
                sample.paired()?
            };
            let mut report = confidence_interval(&s, &w, level, interval, seed)?;
            report.variant = variant;
            report
        }
    };
    to_json(&report)
}

fn cmd_true_value(
    model: String,
    weight: String,
    premium: bool,
    grid_size: usize,
    truncation: f64,
) -> Result<String, CliError> {
    let model = load_model(&model)?;
    let w: WeightSpec = input::json_arg("weight", &weight)?;
    let (quantity, value, variance_model) = if premium {
        let marginal = model.marginal_x();
        let value = true_premium(&marginal, &w)?;
        ("premium", value, ModelSpec::SelfRisk { marginal })
    } else {
        ("allocation", model.true_allocation(&w)?, model)
    };
    let mut out = json!({ "quantity": quantity, "value": value });
    match sigma_sq_oracle(&variance_model, &w, grid_size, truncation) {
        Ok(report) => {
            out["sigma_sq"] = json!(report.sigma_sq);
            out["variance"] = serde_json::to_value(&report).expect("report serializes");
        }
        // The value alone is still meaningful when σ² does not exist.
        Err(e @ (walloc::Error::Unsupported(_) | walloc::Error::Divergent(_))) => {
            out["sigma_sq"] = Value::Null;
            out["sigma_sq_unavailable"] = json!(e.to_string());
        }
        Err(e) => return Err(e.into()),
    }
    to_json(&out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_variance(
    weight: String,
    method: MethodArg,
    data: Option<PathBuf>,
    model: Option<String>,
    replicates: usize,
    seed: u64,
    grid_size: usize,
    truncation: f64,
) -> Result<String, CliError> {
    let w: WeightSpec = input::json_arg("weight", &weight)?;
    let report = match method {
        MethodArg::Oracle => {
            let model = model.ok_or_else(|| CliError::config("--method oracle needs --model"))?;
            sigma_sq_oracle(&load_model(&model)?, &w, grid_size, truncation)?
        }
        MethodArg::Plugin | MethodArg::Bootstrap => {
            let path = data.ok_or_else(|| CliError::config("plugin and bootstrap need --data"))?;
            let s = input::read_csv(&path)?.paired_or_self()?;
            if method == MethodArg::Plugin {
                sigma_sq_plugin(&s, &w)?
            } else {
                bootstrap_variance(&s, &w, replicates, seed)?
            }
        }
    };
    to_json(&report)
}

struct SimulateOverrides {
    output: Option<PathBuf>,
    seed: Option<u64>,
    level: Option<f64>,
    method: Option<MethodArg>,
    grid_size: Option<usize>,
    truncation: Option<f64>,
}

fn cmd_simulate(config: PathBuf, o: SimulateOverrides) -> Result<String, CliError> {
    let text = input::read_file(&config)?;
    let mut cfg: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("invalid experiment config: {e}")))?;
    if let Some(seed) = o.seed {
        cfg.master_seed = seed;
    }
    if let Some(level) = o.level {
        cfg.ci_level = level;
    }
    if let Some(method) = o.method {
        cfg.variance_method = method.into();
    }
    if let Some(grid_size) = o.grid_size {
        cfg.grid_size = grid_size;
    }
    if let Some(truncation) = o.truncation {
        cfg.truncation = truncation;
    }
    let dir = o.output.unwrap_or_else(|| PathBuf::from(&cfg.output_path));
    let dir = if dir.as_os_str().is_empty() {
        PathBuf::from(".")
    } else {
        dir
    };
    cfg.validate()?;
    if cfg.replications == 1 {
        eprintln!("warning: replications = 1, statistics degenerate");
    }

    let result = run_experiment(&cfg)?;

    let io_err =
        |e: std::io::Error| CliError::config(format!("cannot write to {}: {e}", dir.display()));
    fs::create_dir_all(&dir).map_err(io_err)?;
    fs::write(dir.join("result.json"), to_json(&result)? + "\n").map_err(io_err)?;
    fs::write(dir.join("result.csv"), result.to_csv()).map_err(io_err)?;

    let mut summary = String::new();
    for row in &result.rows {
        let mut line = format!(
            "n={} mean={} bias={} rmse={} scaled_var={}",
            row.n, row.mean_estimate, row.bias, row.rmse, row.scaled_variance
        );
        if let Some(ks) = row.ks_statistic {
            line += &format!(" ks={ks}");
        }
        if let Some(c) = row.coverage {
            line += &format!(" coverage={c}");
        }
        line += &format!(" failures={}\n", row.failures);
        summary += &line;
    }
    Ok(summary.trim_end().to_string())
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Estimate {
            data,
            weight,
            variant,
            level,
            method,
            replicates,
            seed,
        } => cmd_estimate(
            data,
            weight,
            variant.into(),
            level,
            method,
            replicates,
            seed,
        ),
        Command::TrueValue {
            model,
            weight,
            premium,
            grid_size,
            truncation,
        } => cmd_true_value(model, weight, premium, grid_size, truncation),
        Command::Variance {
            weight,
            method,
            data,
            model,
            replicates,
            seed,
            grid_size,
            truncation,
        } => cmd_variance(
            weight, method, data, model, replicates, seed, grid_size, truncation,
        ),
        Command::Simulate {
            config,
            output,
            seed,
            level,
            method,
            grid_size,
            truncation,
        } => cmd_simulate(
            config,
            SimulateOverrides {
                output,
                seed,
                level,
                method,
                grid_size,
                truncation,
            },
        ),
    }
}

/// Writes a line to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}").and_then(|_| out.flush());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let e = CliError::config(e.to_string().trim_end());
            emit(&e.to_json().to_string());
            return ExitCode::from(e.code);
        }
    };
    match run(cli) {
        Ok(out) => {
            emit(&out);
            ExitCode::SUCCESS
        }
        Err(e) => {
            emit(&e.to_json().to_string());
            ExitCode::from(e.code)
        }
    }
}
