//! `pud`: closed forms, simulation and sweeps for penalty-upon-decision metrics.
//!
//! Exit codes: 0 success, 1 invalid arguments or I/O failure, 2 domain or
//! stability error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pud_core::experiments::{
    self, linear_grid, Model, ModelParams, SweepParam, SweepRow, SweepSpec, Tolerances, DEFAULT_BATCHES,
    DEFAULT_PACKETS, DEFAULT_SEED,
};
use pud_core::{PudError, Result, ServiceDistribution};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "pud", version, about = "Penalty-upon-decision metrics for status-update queues")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form metrics for one configuration.
    Analyze {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo estimates with batch-means standard errors.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Closed forms and simulation side by side, one row per metric.
    Compare {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Absolute tolerance on probabilities.
        #[arg(long, default_value_t = 0.005)]
        prob_tol: f64,
        /// Relative tolerance on mean penalties.
        #[arg(long, default_value_t = 0.03)]
        penalty_tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Vary one parameter over a grid.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        /// Parameter to vary: lambda, mu, alpha (gamma shape at fixed mean) or k.
        #[arg(long)]
        vary: SweepParam,
        #[arg(long, requires_all = ["to", "steps"], conflicts_with = "values")]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        /// Explicit grid, comma separated.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        /// Skip the simulated rows.
        #[arg(long)]
        analytic_only: bool,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Regenerate a named figure preset (num1, num2, num3, num4-draft).
    Figure {
        #[arg(long)]
        id: String,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// mg1, mg11 or mm1k.
    #[arg(long)]
    model: Model,
    #[arg(long)]
    lambda: f64,
    /// Exponential service rate (shorthand for --service exp:mu=<MU>).
    #[arg(long)]
    mu: Option<f64>,
    /// exp:mu=<rate>, gamma:alpha=<shape>,rate=<rate> or det:d=<value>.
    #[arg(long)]
    service: Option<ServiceDistribution>,
    /// System capacity for mm1k.
    #[arg(long)]
    k: Option<u32>,
}

impl ModelArgs {
    fn params(&self) -> ModelParams {
        ModelParams { model: self.model, lambda: self.lambda, mu: self.mu, service: self.service, k: self.k }
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, default_value_t = DEFAULT_PACKETS)]
    packets: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_BATCHES)]
    batches: u32,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output file; defaults to stdout, or to a file under --out-dir for sweep and figure.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Default directory for sweep and figure files.
    #[arg(long, env = "PUD_OUT_DIR")]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl OutputArgs {
    /// `default_name` is used under `--out-dir` for file-producing commands.
    fn open(&self, default_name: Option<&str>, format: Format) -> Result<Box<dyn Write>> {
        let path = self.out.clone().or_else(|| {
            let dir = self.out_dir.as_ref()?;
            default_name.map(|n| dir.join(format!("{n}.{}", format.extension())))
        });
        Ok(match path {
            Some(p) => {
                let f = File::create(&p).map_err(|e| PudError::Io(format!("{}: {e}", p.display())))?;
                Box::new(BufWriter::new(f))
            }
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Analyze { model, output } => {
            let report = model.params().resolve()?.analyze()?.rounded();
            emit_record(&output, serde_json::to_value(report).map_err(json_err)?)
        }
        Command::Simulate { model, run, output } => {
            let params = model.params();
            let spec = params.resolve()?;
            let summary = spec.simulate(run.packets, run.seed, 0, run.batches)?.rounded();
            let value = json!({
                "model": spec.model,
                "lambda": spec.lambda,
                "service": spec.service.to_string(),
                "K": spec.k,
                "summary": summary,
            });
            emit_record(&output, value)
        }
        Command::Compare { model, run, prob_tol, penalty_tol, output } => {
            let tol = Tolerances { probability_abs: prob_tol, penalty_rel: penalty_tol, ..Tolerances::default() };
            let spec = model.params().resolve()?;
            let rows = experiments::compare(&spec, run.packets, run.seed, run.batches, &tol)?;
            let format = output.format.unwrap_or(Format::Csv);
            let mut out = output.open(None, format)?;
            match format {
                Format::Csv => experiments::write_compare_csv(&rows, &mut out)?,
                Format::Json => write_json(&mut out, &rows)?,
            }
            out.flush().map_err(PudError::from)
        }
        Command::Sweep { model, vary, from, to, steps, values, analytic_only, run, output } => {
            let values = match (values, from, to, steps) {
                (Some(v), ..) if !v.is_empty() => v,
                (None, Some(f), Some(t), Some(s)) => linear_grid(f, t, s)?,
                _ => return Err(PudError::Argument("give --values or all of --from, --to, --steps".into())),
            };
            let spec = SweepSpec {
                base: model.params(),
                vary,
                values,
                packets: run.packets,
                seed: run.seed,
                batches: run.batches,
                simulate: !analytic_only,
            };
            let rows = experiments::run_sweep(&spec)?;
            emit_rows(&output, "sweep", &rows)
        }
        Command::Figure { id, run, output } => {
            let rows = experiments::run_figure(&id, run.packets, run.seed, run.batches)?;
            emit_rows(&output, &id, &rows)
        }
    }
}

fn json_err(e: serde_json::Error) -> PudError {
    PudError::Io(e.to_string())
}

fn write_json<W: Write, T: serde::Serialize + ?Sized>(out: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(json_err)?;
    writeln!(out)?;
    Ok(())
}

/// A single record: JSON object, or `field,value` lines with nested fields
/// joined by dots.
fn emit_record(output: &OutputArgs, value: Value) -> Result<()> {
    let format = output.format.unwrap_or(Format::Json);
    let mut out = output.open(None, format)?;
    match format {
        Format::Json => write_json(&mut out, &value)?,
        Format::Csv => {
            let mut cells = Vec::new();
            flatten("", &value, &mut cells);
            writeln!(out, "field,value")?;
            for (k, v) in cells {
                writeln!(out, "{k},{v}")?;
            }
        }
    }
    out.flush().map_err(PudError::from)
}

fn flatten(prefix: &str, value: &Value, cells: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match value {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&key(k), v, cells)),
        Value::Array(items) => items.iter().enumerate().for_each(|(i, v)| flatten(&key(&i.to_string()), v, cells)),
        Value::Null => cells.push((prefix.to_string(), String::new())),
        Value::String(s) => cells.push((prefix.to_string(), s.clone())),
        other => cells.push((prefix.to_string(), other.to_string())),
    }
}

fn emit_rows(output: &OutputArgs, name: &str, rows: &[SweepRow]) -> Result<()> {
    let format = output.format.unwrap_or(Format::Csv);
    let mut out = output.open(Some(name), format)?;
    match format {
        Format::Csv => experiments::write_sweep_csv(rows, &mut out)?,
        Format::Json => write_json(&mut out, rows)?,
    }
    out.flush().map_err(PudError::from)
}
