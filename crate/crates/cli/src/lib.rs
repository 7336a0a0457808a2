//! Batch experiment runner: resolves a configuration (JSON file plus flags),
//! runs one command on a bounded thread pool, and emits versioned JSON and
//! CSV reports.

pub mod commands;
pub mod config;
pub mod error;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{comparable, execute, write_outputs, RunOutcome};
pub use config::{Command, ExperimentConfig, ResolvedConfig, Runtime, BUDGET_ENV};
pub use error::{exit, CliError, CliResult};

const AFTER_HELP: &str = "\
Exit codes:
  0  success
  1  a verified identity or bound failed
  2  invalid flags or configuration
  3  unknown catalog entry
  4  enumeration budget exceeded (use `sample` instead)
  5  classifier precondition violated (e.g. quadric-exact in characteristic 2)
  6  invalid mathematical input (field, dimensions, equations)
  7  i/o error

Environment:
  GSL_BUDGET  enumeration budget, used when --budget is absent";

#[derive(Debug, Parser)]
#[command(name = "slicelab", version, about = "Finite-field slice statistics experiments", after_help = AFTER_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Exact slice statistics and their closed forms over a field/k grid.
    VerifyLemma(RunArgs),
    /// Full bad-locus census with the Chebyshev check.
    Census(RunArgs),
    /// Growth exponent of very-bad counts across fields.
    Scaling(RunArgs),
    /// U / M_H scan for a catalog cone.
    Sharpness(RunArgs),
    /// Seeded Monte Carlo census.
    Sample(RunArgs),
    /// Point counts over extensions and component estimates.
    Count(RunArgs),
    /// Run the command named in the config file.
    Run(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// JSON config file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub flags: ExperimentConfig,
}

impl CliCommand {
    pub fn parts(self) -> (Option<Command>, RunArgs) {
        match self {
            CliCommand::VerifyLemma(a) => (Some(Command::VerifyLemma), a),
            CliCommand::Census(a) => (Some(Command::Census), a),
            CliCommand::Scaling(a) => (Some(Command::Scaling), a),
            CliCommand::Sharpness(a) => (Some(Command::Sharpness), a),
            CliCommand::Sample(a) => (Some(Command::Sample), a),
            CliCommand::Count(a) => (Some(Command::Count), a),
            CliCommand::Run(a) => (None, a),
        }
    }
}

/// Resolves a parsed command line against its config file and the
/// environment budget.
pub fn resolve(cli: Cli, env_budget: Option<&str>) -> CliResult<(ResolvedConfig, Runtime)> {
    let (command, args) = cli.command.parts();
    let file = match &args.config {
        Some(p) => ExperimentConfig::from_file(p)?,
        None => ExperimentConfig::default(),
    };
    let mut flags = args.flags;
    flags.command = command;
    ExperimentConfig::resolve(flags, file, env_budget)
}

/// Parses, runs and writes reports; returns the process exit code.
pub fn main_with_args<I, T>(args: I, env_budget: Option<&str>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            };
        }
    };
    match run(cli, env_budget) {
        Ok(passed) => {
            if passed {
                exit::OK
            } else {
                exit::CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli, env_budget: Option<&str>) -> CliResult<bool> {
    let (config, runtime) = resolve(cli, env_budget)?;
    let out = execute(&config, &runtime)?;
    match &runtime.output {
        Some(dir) => {
            write_outputs(dir, config.command, &out)?;
            println!(
                "{}: {} (reports in {})",
                config.command.name(),
                if out.passed { "pass" } else { "FAIL" },
                dir.display()
            );
        }
        None => println!("{}", serde_json::to_string_pretty(&out.json)?),
    }
    Ok(out.passed)
}
