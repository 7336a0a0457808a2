use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use slicelab::census::{
    chebyshev_check, full_census, monte_carlo_census, scaling_fit, BadLocusCensus, ChebyshevReport,
    MonteCarloCensus,
};
use slicelab::constructions::run_sharpness;
use slicelab::rational::ExactRational;
use slicelab::stats::{verify_lemma, LemmaReport};
use slicelab::variety::default_tau;
use slicelab::{Budget, ScalingFit};

use crate::config::{Command, ResolvedConfig, Runtime, VarietySource};
use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    schema: String,
    version: &'static str,
    config: &'a ResolvedConfig,
    passed: bool,
    results: T,
    /// Excluded from reproducibility comparisons.
    run: RunInfo,
}

#[derive(Serialize)]
struct RunInfo {
    timestamp: u64,
    workers: usize,
}

/// A finished run: the JSON report, the CSV table if any, and whether
/// every check passed.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub json: serde_json::Value,
    pub csv: Option<String>,
    pub passed: bool,
}

/// Runs the configured command on a pool of `runtime.workers` threads.
pub fn execute(config: &ResolvedConfig, runtime: &Runtime) -> CliResult<RunOutcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(runtime.workers)
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let (results, csv, passed) = pool.install(|| dispatch(config))?;
    let report = Report {
        schema: format!("slicelab/{}/v{SCHEMA_VERSION}", config.command.name()),
        version: env!("CARGO_PKG_VERSION"),
        config,
        passed,
        results,
        run: RunInfo {
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            workers: runtime.workers,
        },
    };
    Ok(RunOutcome {
        json: serde_json::to_value(&report)?,
        csv,
        passed,
    })
}

/// The report with its run metadata removed, for comparing runs.
pub fn comparable(json: &serde_json::Value) -> serde_json::Value {
    let mut v = json.clone();
    if let Some(obj) = v.as_object_mut() {
        obj.remove("run");
    }
    v
}

type Dispatched = (serde_json::Value, Option<String>, bool);

fn dispatch(c: &ResolvedConfig) -> CliResult<Dispatched> {
    let source = c.source()?;
    let budget = Budget(c.budget);
    match c.command {
        Command::VerifyLemma => verify(c, &source, budget),
        Command::Census => census(c, &source, budget),
        Command::Scaling => scaling(c, &source, budget),
        Command::Sharpness => sharpness(c, &source, budget),
        Command::Sample => sample(c, &source, budget),
        Command::Count => count(c, &source, budget),
    }
}

fn to_csv<R: Serialize>(rows: &[R]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Serialize)]
struct LemmaRow {
    q: u64,
    n: usize,
    k: usize,
    r: usize,
    x_count: u64,
    v_count: u64,
    mu_num: String,
    mu_den: String,
    sigma2_num: String,
    sigma2_den: String,
    b_num: String,
    b_den: String,
    passed: bool,
}

fn verify(c: &ResolvedConfig, source: &VarietySource, budget: Budget) -> CliResult<Dispatched> {
    let mut reports: Vec<LemmaReport> = Vec::new();
    for f in c.parsed_fields()? {
        let x = source.instantiate(&f)?;
        for &k in &c.k {
            reports.push(verify_lemma(&x, &f, k, budget)?);
        }
    }
    let rows: Vec<LemmaRow> = reports
        .iter()
        .map(|r| LemmaRow {
            q: r.q,
            n: r.n,
            k: r.k,
            r: r.r,
            x_count: r.x_count,
            v_count: r.v_count,
            mu_num: r.mu.num.clone(),
            mu_den: r.mu.den.clone(),
            sigma2_num: r.sigma2.num.clone(),
            sigma2_den: r.sigma2.den.clone(),
            b_num: r.b.num.clone(),
            b_den: r.b.den.clone(),
            passed: r.passed,
        })
        .collect();
    let passed = reports.iter().all(|r| r.passed);
    Ok((
        serde_json::to_value(&reports)?,
        Some(to_csv(&rows)?),
        passed,
    ))
}

#[derive(Serialize)]
struct CensusRow {
    q: u64,
    n: usize,
    k: usize,
    r: usize,
    total: u64,
    very_bad: u64,
    deviation: u64,
    chebyshev_bound_num: String,
    chebyshev_bound_den: String,
    class_irreducible: u64,
    class_split: u64,
    class_conjugate: u64,
    class_double: u64,
    class_whole: u64,
}

impl From<&BadLocusCensus> for CensusRow {
    fn from(c: &BadLocusCensus) -> Self {
        Self {
            q: c.q,
            n: c.n,
            k: c.k,
            r: c.r,
            total: c.total,
            very_bad: c.very_bad_count,
            deviation: c.deviation_count,
            chebyshev_bound_num: c.chebyshev_bound.numer().to_string(),
            chebyshev_bound_den: c.chebyshev_bound.denom().to_string(),
            class_irreducible: c.classes.irreducible,
            class_split: c.classes.split,
            class_conjugate: c.classes.conjugate,
            class_double: c.classes.double,
            class_whole: c.classes.whole,
        }
    }
}

#[derive(Serialize)]
struct CensusResult {
    census: BadLocusCensus,
    chebyshev: ChebyshevReport,
}

fn census(c: &ResolvedConfig, source: &VarietySource, budget: Budget) -> CliResult<Dispatched> {
    let classifier = c.classifier();
    let mut results = Vec::new();
    for f in c.parsed_fields()? {
        let x = source.instantiate(&f)?;
        for &k in &c.k {
            let census = full_census(&x, &f, k, &classifier, budget)?;
            let chebyshev = chebyshev_check(&census);
            results.push(CensusResult { census, chebyshev });
        }
    }
    let rows: Vec<CensusRow> = results.iter().map(|r| (&r.census).into()).collect();
    let passed = results.iter().all(|r| r.chebyshev.holds);
    Ok((
        serde_json::to_value(&results)?,
        Some(to_csv(&rows)?),
        passed,
    ))
}

#[derive(Serialize)]
struct ScalingResult {
    fit: ScalingFit,
    within_tolerance: Option<bool>,
    censuses: Vec<CensusResult>,
}

fn scaling(c: &ResolvedConfig, source: &VarietySource, budget: Budget) -> CliResult<Dispatched> {
    let classifier = c.classifier();
    let k = c.k[0];
    let fields = c.parsed_fields()?;
    let (censuses, fit) = scaling_fit(
        |q| {
            let f = fields
                .iter()
                .find(|f| f.order() == q)
                .expect("q comes from the field list");
            let x = source.instantiate(f).map_err(|e| match e {
                CliError::Core(e) => e,
                other => slicelab::Error::InvalidArgument(other.to_string()),
            })?;
            full_census(&x, f, k, &classifier, budget)
        },
        &fields.iter().map(|f| f.order()).collect::<Vec<_>>(),
    )?;
    let rows: Vec<CensusRow> = censuses.iter().map(CensusRow::from).collect();
    let censuses: Vec<CensusResult> = censuses
        .into_iter()
        .map(|census| CensusResult {
            chebyshev: chebyshev_check(&census),
            census,
        })
        .collect();
    let within_tolerance = c.tolerance.map(|t| fit.residual <= t);
    let passed = censuses.iter().all(|r| r.chebyshev.holds) && within_tolerance != Some(false);
    let result = ScalingResult {
        fit,
        within_tolerance,
        censuses,
    };
    Ok((serde_json::to_value(&result)?, Some(to_csv(&rows)?), passed))
}

fn sharpness(c: &ResolvedConfig, source: &VarietySource, budget: Budget) -> CliResult<Dispatched> {
    let spec = match source {
        VarietySource::Catalog(e) => e.cone_spec(),
        VarietySource::File(_) => None,
    }
    .ok_or_else(|| CliError::Config("sharpness needs a cone from the catalog".into()))?;
    let exp = run_sharpness(&spec, c.k[0], &c.primes()?, budget)?;
    let passed = exp
        .results
        .iter()
        .all(|r| r.witnesses_unique && r.witnesses_bad);
    Ok((
        serde_json::to_value(&exp)?,
        Some(to_csv(&exp.results)?),
        passed,
    ))
}

#[derive(Serialize)]
struct SampleRow {
    q: u64,
    n: usize,
    k: usize,
    samples: u64,
    seed: u64,
    very_bad: u64,
    fraction: f64,
    interval_low: f64,
    interval_high: f64,
}

fn sample(c: &ResolvedConfig, source: &VarietySource, budget: Budget) -> CliResult<Dispatched> {
    let classifier = c.classifier();
    let samples = c.samples.expect("resolved");
    let seed = c.seed.expect("resolved");
    let mut results: Vec<MonteCarloCensus> = Vec::new();
    for f in c.parsed_fields()? {
        let x = source.instantiate(&f)?;
        for &k in &c.k {
            results.push(monte_carlo_census(
                &x,
                &f,
                k,
                &classifier,
                samples,
                seed,
                budget,
            )?);
        }
    }
    let rows: Vec<SampleRow> = results
        .iter()
        .map(|m| SampleRow {
            q: m.q,
            n: m.n,
            k: m.k,
            samples: m.samples,
            seed: m.seed,
            very_bad: m.very_bad,
            fraction: m.fraction,
            interval_low: m.interval.0,
            interval_high: m.interval.1,
        })
        .collect();
    Ok((serde_json::to_value(&results)?, Some(to_csv(&rows)?), true))
}

#[derive(Serialize)]
struct CountResult {
    field: String,
    q: u64,
    n: usize,
    r: usize,
    counts: Vec<(u32, u64)>,
    ratios: Vec<ExactRational>,
    a_est: u64,
    g_est: Option<u64>,
}

#[derive(Serialize)]
struct CountRow {
    q: u64,
    m: u32,
    count: u64,
}

fn count(c: &ResolvedConfig, source: &VarietySource, budget: Budget) -> CliResult<Dispatched> {
    let mut results = Vec::new();
    let mut rows = Vec::new();
    for f in c.parsed_fields()? {
        let x = source.instantiate(&f)?;
        let est = x.estimate_components(&f, &c.ext_degrees, &default_tau(), budget)?;
        for &(m, n) in &est.counts {
            rows.push(CountRow {
                q: f.order(),
                m,
                count: n,
            });
        }
        results.push(CountResult {
            field: f.name(),
            q: f.order(),
            n: x.n(),
            r: x.declared_dim(),
            counts: est.counts.clone(),
            ratios: est.ratios.iter().map(ExactRational::from).collect(),
            a_est: est.a_est,
            g_est: est.g_est,
        });
    }
    Ok((serde_json::to_value(&results)?, Some(to_csv(&rows)?), true))
}

/// Writes `<dir>/<command>.json` and, when tabular, `<dir>/<command>.csv`.
pub fn write_outputs(dir: &std::path::Path, command: Command, out: &RunOutcome) -> CliResult<()> {
    std::fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(&out.json)?;
    std::fs::write(dir.join(format!("{}.json", command.name())), json + "\n")?;
    if let Some(csv) = &out.csv {
        std::fs::write(dir.join(format!("{}.csv", command.name())), csv)?;
    }
    Ok(())
}
