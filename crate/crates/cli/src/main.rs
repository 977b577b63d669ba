//! `scalekit`: batch front end for the scaling library.
//!
//! Reads one JSON input, writes one JSON report (and optionally a CSV trace),
//! and exits with 0 (converged), 2 (not scalable), 3 (budget exhausted or
//! undetermined) or 1 (error).

mod commands;
mod error;
mod input;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use scalekit::report::DEFAULT_BUDGET_CONSTANT;
use scalekit::ScalingOptions;

use crate::commands::Outcome;
use crate::error::{error_object, CliError};
use crate::input::Document;

#[derive(Debug, Parser)]
#[command(
    name = "scalekit",
    version,
    about = "Matrix, operator and tensor scaling with exact certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sinkhorn scaling of a non-negative matrix.
    ScaleMatrix,
    /// Operator scaling of a matrix tuple.
    ScaleOperator,
    /// Tensor scaling under local special linear groups.
    ScaleTensor,
    /// Exact null-cone certificates (torus, matrix-support, tensor-support) or the operator test.
    Nullcone,
    /// Permanent interval from scaling, with the exact value for small inputs.
    Permanent,
    /// Brascamp-Lieb feasibility, scaling, Forster position or matroid membership.
    Bl,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Input JSON file; standard input when absent or `-`.
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Report file; standard output when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// CSV file for the iteration trace of scaling commands.
    #[arg(long, global = true)]
    trace: Option<PathBuf>,

    /// Target distance to the scaled form.
    #[arg(long, global = true, default_value_t = 1e-6)]
    epsilon: f64,

    /// Constant C in the iteration budget.
    #[arg(long = "budget-constant", global = true, default_value_t = DEFAULT_BUDGET_CONSTANT)]
    budget_constant: f64,

    /// Fixed iteration budget, replacing the computed one.
    #[arg(long, global = true)]
    budget: Option<u64>,

    /// Seed for randomized subroutines.
    #[arg(long, global = true, env = "SCALEKIT_SEED", default_value_t = 0)]
    seed: u64,

    /// Variant for `nullcone` and `bl`; overrides a "flavor" field in the input.
    #[arg(long, global = true)]
    flavor: Option<String>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

impl RunArgs {
    fn options(&self) -> Result<ScalingOptions, CliError> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(CliError::Usage(format!(
                "--epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.budget_constant > 0.0 && self.budget_constant.is_finite()) {
            return Err(CliError::Usage(format!(
                "--budget-constant must be positive, got {}",
                self.budget_constant
            )));
        }
        let mut opts = ScalingOptions::new(self.epsilon)
            .with_budget_constant(self.budget_constant)
            .with_seed(self.seed);
        if let Some(b) = self.budget {
            opts = opts.with_budget(b);
        }
        Ok(opts)
    }
}

fn flavor(run: &RunArgs, doc: &Document) -> Result<String, CliError> {
    run.flavor
        .clone()
        .or_else(|| doc.flavor.clone())
        .ok_or_else(|| {
            CliError::Usage("a flavor is required (--flavor or a \"flavor\" field)".into())
        })
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let Format::Json = cli.run.format;
    let opts = cli.run.options()?;
    let doc = Document::read(cli.run.input.as_deref())?;
    match cli.command {
        Command::ScaleMatrix => commands::scale_matrix(&doc, &opts),
        Command::ScaleOperator => commands::scale_operator(&doc, &opts),
        Command::ScaleTensor => commands::scale_tensor(&doc, &opts),
        Command::Nullcone => commands::nullcone(&doc, &flavor(&cli.run, &doc)?, &opts),
        Command::Permanent => commands::permanent(&doc, &opts),
        Command::Bl => commands::bl(&doc, &flavor(&cli.run, &doc)?, &opts),
    }
}

fn emit(path: Option<&PathBuf>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => output::write_atomic(p, bytes).map_err(|source| CliError::Write {
            path: p.display().to_string(),
            source,
        }),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|source| CliError::Write {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn finish(cli: &Cli, outcome: Outcome) -> Result<u8, CliError> {
    let bytes =
        output::to_json_bytes(&outcome.json).map_err(|e| CliError::Schema(e.to_string()))?;
    if let (Some(path), Some(rows)) = (&cli.run.trace, &outcome.trace) {
        emit(Some(path), &output::trace_csv(rows))?;
    }
    emit(cli.run.output.as_ref(), &bytes)?;
    Ok(outcome.exit_code)
}

fn report_error(err: &CliError, output: Option<&PathBuf>) -> ExitCode {
    eprintln!("error: {err}");
    if let Ok(bytes) = output::to_json_bytes(&err.to_json()) {
        if emit(output, &bytes).is_err() && output.is_some() {
            let _ = std::io::stdout().write_all(&bytes);
        }
    }
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return ExitCode::SUCCESS;
            }
            if let Ok(bytes) = output::to_json_bytes(&error_object("usage", &e.kind().to_string()))
            {
                let _ = std::io::stdout().write_all(&bytes);
            }
            return ExitCode::from(1);
        }
    };
    match execute(&cli).and_then(|outcome| finish(&cli, outcome)) {
        Ok(code) => ExitCode::from(code),
        Err(err) => report_error(&err, cli.run.output.as_ref()),
    }
}
