use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use slicelab::constructions::{lookup, CatalogEntry};
use slicelab::{parse_field, Classifier, Field, ProjectiveVariety, DEFAULT_BUDGET};

use crate::error::{CliError, CliResult};

pub const BUDGET_ENV: &str = "GSL_BUDGET";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyLemma,
    Census,
    Scaling,
    Sharpness,
    Sample,
    Count,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyLemma => "verify-lemma",
            Command::Census => "census",
            Command::Scaling => "scaling",
            Command::Sharpness => "sharpness",
            Command::Sample => "sample",
            Command::Count => "count",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ClassifierName {
    QuadricExact,
    ComponentEstimate,
}

/// Experiment settings as read from a JSON file or from flags. Every field
/// is optional; flags override the file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Subcommand to run (config files only).
    #[arg(skip)]
    pub command: Option<Command>,
    /// Catalog name or path to a variety file.
    #[arg(long)]
    pub variety: Option<String>,
    /// Fields as "p" or "p^m", comma separated.
    #[arg(long = "fields", alias = "field", value_delimiter = ',')]
    pub fields: Vec<String>,
    /// Slice codimensions, comma separated.
    #[arg(long = "k", value_delimiter = ',')]
    pub k: Vec<usize>,
    #[arg(long, value_enum)]
    pub classifier: Option<ClassifierName>,
    /// Extension degrees for the component estimator and for `count`.
    #[arg(long, value_delimiter = ',')]
    pub ext_degrees: Vec<u32>,
    /// Sample size for `sample`.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Seed for `sample` (required there).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Enumeration budget; overrides GSL_BUDGET and the config file.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Maximum |exponent - predicted| accepted by `scaling`.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Directory for the JSON and CSV reports; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Field-wise `self` over `base`.
    pub fn over(self, base: ExperimentConfig) -> Self {
        fn pick<T>(a: Vec<T>, b: Vec<T>) -> Vec<T> {
            if a.is_empty() {
                b
            } else {
                a
            }
        }
        Self {
            command: self.command.or(base.command),
            variety: self.variety.or(base.variety),
            fields: pick(self.fields, base.fields),
            k: pick(self.k, base.k),
            classifier: self.classifier.or(base.classifier),
            ext_degrees: pick(self.ext_degrees, base.ext_degrees),
            samples: self.samples.or(base.samples),
            seed: self.seed.or(base.seed),
            budget: self.budget.or(base.budget),
            tolerance: self.tolerance.or(base.tolerance),
            output: self.output.or(base.output),
            workers: self.workers.or(base.workers),
        }
    }

    /// Fills defaults and validates. The budget comes from the flag, then
    /// `env_budget`, then the file, then the default.
    pub fn resolve(
        flags: ExperimentConfig,
        file: ExperimentConfig,
        env_budget: Option<&str>,
    ) -> CliResult<(ResolvedConfig, Runtime)> {
        let flag_budget = flags.budget;
        let file_budget = file.budget;
        let c = flags.over(file);
        let command = c
            .command
            .ok_or_else(|| CliError::Config("no command given".into()))?;
        let env_budget = env_budget
            .map(|s| {
                s.trim().parse::<u64>().map_err(|_| {
                    CliError::Config(format!(
                        "{BUDGET_ENV} must be a positive integer, got `{s}`"
                    ))
                })
            })
            .transpose()?;
        let budget = flag_budget
            .or(env_budget)
            .or(file_budget)
            .unwrap_or(DEFAULT_BUDGET);
        if budget == 0 {
            return Err(CliError::Config("budget must be positive".into()));
        }
        let variety = c
            .variety
            .ok_or_else(|| CliError::Config("--variety is required".into()))?;
        let fields = if c.fields.is_empty() {
            match command {
                Command::Scaling | Command::Sharpness => vec!["3".into(), "5".into(), "7".into()],
                _ => vec!["3".into()],
            }
        } else {
            c.fields
        };
        let fields = fields
            .iter()
            .map(|s| Ok(parse_field(s.trim())?.name()))
            .collect::<CliResult<Vec<_>>>()?;
        let k = if c.k.is_empty() { vec![1] } else { c.k };
        if matches!(command, Command::Scaling | Command::Sharpness) && k.len() != 1 {
            return Err(CliError::Config(format!(
                "{} takes a single k",
                command.name()
            )));
        }
        let seed = match (command, c.seed) {
            (Command::Sample, None) => {
                return Err(CliError::Config("sample needs --seed".into()));
            }
            (_, s) => s,
        };
        let samples = match command {
            Command::Sample => Some(c.samples.unwrap_or(2000)),
            _ => c.samples,
        };
        if c.workers == Some(0) {
            return Err(CliError::Config("workers must be positive".into()));
        }
        let resolved = ResolvedConfig {
            command,
            variety,
            fields,
            k,
            classifier: c.classifier.unwrap_or(ClassifierName::QuadricExact),
            ext_degrees: if c.ext_degrees.is_empty() {
                vec![1, 2]
            } else {
                c.ext_degrees
            },
            samples,
            seed,
            budget,
            tolerance: c.tolerance,
        };
        let runtime = Runtime {
            output: c.output,
            workers: c
                .workers
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
        };
        Ok((resolved, runtime))
    }
}

/// The settings that determine a report's results.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolvedConfig {
    pub command: Command,
    pub variety: String,
    pub fields: Vec<String>,
    pub k: Vec<usize>,
    pub classifier: ClassifierName,
    pub ext_degrees: Vec<u32>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub budget: u64,
    pub tolerance: Option<f64>,
}

/// Settings that do not affect results.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Runtime {
    pub output: Option<PathBuf>,
    pub workers: usize,
}

impl ResolvedConfig {
    pub fn classifier(&self) -> Classifier {
        match self.classifier {
            ClassifierName::QuadricExact => Classifier::QuadricExact,
            ClassifierName::ComponentEstimate => Classifier::ComponentEstimate {
                ext_degrees: self.ext_degrees.clone(),
            },
        }
    }

    pub fn parsed_fields(&self) -> CliResult<Vec<Field>> {
        self.fields.iter().map(|s| Ok(parse_field(s)?)).collect()
    }

    /// Fields restricted to primes, for commands that reduce integer
    /// equations modulo p.
    pub fn primes(&self) -> CliResult<Vec<u64>> {
        self.parsed_fields()?
            .iter()
            .map(|f| {
                if f.is_prime_field() {
                    Ok(f.p() as u64)
                } else {
                    Err(CliError::Config(format!(
                        "{} needs prime fields, got {}",
                        self.command.name(),
                        f.name()
                    )))
                }
            })
            .collect()
    }

    pub fn source(&self) -> CliResult<VarietySource> {
        match lookup(&self.variety) {
            Ok(e) => Ok(VarietySource::Catalog(e)),
            Err(err) => {
                let path = Path::new(&self.variety);
                if path.is_file() {
                    let text = std::fs::read_to_string(path)?;
                    Ok(VarietySource::File(ProjectiveVariety::parse_file(&text)?))
                } else {
                    Err(err.into())
                }
            }
        }
    }
}

pub enum VarietySource {
    Catalog(CatalogEntry),
    File(ProjectiveVariety),
}

impl VarietySource {
    pub fn instantiate(&self, field: &Field) -> CliResult<ProjectiveVariety> {
        match self {
            VarietySource::Catalog(e) => Ok(e.instantiate(field)?),
            VarietySource::File(x) => {
                x.check_field(field)?;
                Ok(x.clone())
            }
        }
    }
}
