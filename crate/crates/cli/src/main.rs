//! Command-line front end: posterior predictive p-values, Fisher
//! randomization tests, normal-approximation p-values, and replication
//! studies, with every artifact written under a run-stamped directory.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use ppp_core::data::ObservedSample;
use ppp_core::estimators::EstimatorKind;
use ppp_core::logistic::sample_posterior;
use ppp_core::ppp::{
    frt_pvalue, normal_pvalue, ppp_algorithm_a, ppp_algorithm_b, PValueReport,
    RandomizationDesign, StatSe, StatisticSpec,
};
use ppp_core::report::{
    histogram_svg, read_pvalues_csv, write_pvalues_csv, write_summary_csv,
};
use ppp_core::sim::{
    run_study, summarize, DgpConfig, DgpKind, ScenarioId, StudyConfig, StudyMethod,
};
use ppp_core::Error;

const EXIT_DATA: i32 = 3;
const EXIT_MODEL: i32 = 4;
const EXIT_STUDY: i32 = 5;

const EXIT_HELP: &str = "Exit codes:
  0  success
  2  usage error (unknown flag or invalid combination)
  3  data error (missing file, malformed CSV, invalid sample)
  4  model or computation error (singular design, separation, degenerate variance)
  5  study reliability error (too many failed replications)

Environment:
  PPP_OUT_DIR  default output directory when --out is not given";

#[derive(Parser, Debug)]
#[command(
    name = "ppp",
    about = "Posterior predictive p-values for the strong null of no causal effects",
    after_help = EXIT_HELP,
    args_conflicts_with_subcommands = true,
    subcommand_negates_reqs = true
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Without a subcommand, runs the PPP pipeline on --data.
    #[command(flatten)]
    ppp: PppArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fisher randomization test under a fully known design
    Frt(FrtArgs),
    /// Normal-approximation p-value from the studentized statistic
    Normal(NormalArgs),
    /// Replication study on a simulated DGP
    Simulate(SimArgs),
    /// Re-summarize a previously written p-value matrix
    Summarize(SummarizeArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Master RNG seed; identical seeds give byte-identical outputs
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker thread cap; any value reproduces the --threads 1 output exactly
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory (default: $PPP_OUT_DIR, else ./ppp-runs)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StatArgs {
    /// Effect estimator: ipw, reg, or dr
    #[arg(long, default_value = "dr")]
    estimator: EstimatorKind,
    /// Studentize the statistic by its estimated standard error
    #[arg(long)]
    studentized: bool,
    /// Standard error inside the studentized statistic: sandwich or bootstrap
    #[arg(long, default_value = "sandwich")]
    se_method: String,
    /// Bootstrap resample count when --se-method bootstrap
    #[arg(long, default_value_t = 2000)]
    bootstrap: usize,
}

impl StatArgs {
    fn spec(&self, seed: u64) -> Result<StatisticSpec, CliError> {
        let mut spec = StatisticSpec::new(self.estimator, self.studentized);
        spec.se_method = match self.se_method.as_str() {
            "sandwich" => StatSe::Sandwich,
            "bootstrap" => StatSe::Bootstrap {
                b: self.bootstrap,
                seed: seed ^ 0xb007,
            },
            other => {
                return Err(CliError::usage(format!(
                    "unknown --se-method `{other}` (expected sandwich|bootstrap)"
                )))
            }
        };
        Ok(spec)
    }
}

#[derive(Args, Debug)]
struct PppArgs {
    /// Input CSV with columns z, y, and covariates
    #[arg(long, required = true)]
    data: Option<PathBuf>,
    #[command(flatten)]
    stat: StatArgs,
    /// Posterior draw count R
    #[arg(long, default_value_t = 2000)]
    draws: usize,
    /// Burn-in iterations discarded before the retained draws
    #[arg(long, default_value_t = 1000)]
    burnin: usize,
    /// PPP variant: `a` (one assignment per draw) or `b` (inner FRT per draw)
    #[arg(long, default_value = "a")]
    algorithm: String,
    /// Inner assignment draws per posterior draw (algorithm b only)
    #[arg(long, default_value_t = 200)]
    inner_draws: usize,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct FrtArgs {
    /// Input CSV with columns z, y, and covariates
    #[arg(long)]
    data: PathBuf,
    /// Randomization design: complete:m=<count> or bernoulli:p=<prob>
    #[arg(long)]
    design: String,
    #[command(flatten)]
    stat: StatArgs,
    /// Monte Carlo assignment draws
    #[arg(long, default_value_t = 10_000)]
    inner_draws: usize,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct NormalArgs {
    /// Input CSV with columns z, y, and covariates
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    stat: StatArgs,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct SimArgs {
    /// Data-generating process: regular or extreme
    #[arg(long, default_value = "regular")]
    dgp: DgpKind,
    /// Model-specification scenario: i, ii, iii, or iv
    #[arg(long, default_value = "i")]
    scenario: ScenarioId,
    /// Replication count
    #[arg(long, default_value_t = 300)]
    reps: usize,
    /// Units per replication
    #[arg(long, default_value_t = 500)]
    n: usize,
    /// Posterior draw count R per replication
    #[arg(long, default_value_t = 300)]
    draws: usize,
    /// Burn-in iterations per replication
    #[arg(long, default_value_t = 300)]
    burnin: usize,
    /// Mean shift of the treated potential outcome (0 under the null)
    #[arg(long, default_value_t = 0.0)]
    tau_shift: f64,
    /// Replace each Z by 1-Z after generation
    #[arg(long)]
    flip: bool,
    /// Effect estimator: ipw, reg, or dr
    #[arg(long, default_value = "dr")]
    estimator: EstimatorKind,
    /// Drop the studentization (the normal comparator is then omitted)
    #[arg(long)]
    unstudentized: bool,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct SummarizeArgs {
    /// p-value matrix CSV written by a previous simulate run
    #[arg(long)]
    pvalues: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn usage(message: String) -> Self {
        CliError { code: 2, message }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io(_)
            | Error::Csv(_)
            | Error::MissingColumn(_)
            | Error::NonBinaryTreatment { .. }
            | Error::ParseCell { .. }
            | Error::InvalidSample(_)
            | Error::NoGeneratorColumns => EXIT_DATA,
            Error::UnreliableStudy { .. } => EXIT_STUDY,
            _ => EXIT_MODEL,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: code={} message={}", e.code, e.message);
        std::process::exit(e.code);
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        None => run_ppp(cli.ppp),
        Some(Command::Frt(args)) => run_frt(args),
        Some(Command::Normal(args)) => run_normal(args),
        Some(Command::Simulate(args)) => run_simulate(args),
        Some(Command::Summarize(args)) => run_summarize(args),
    }
}

#[cfg(feature = "parallel")]
fn init_threads(threads: Option<usize>) {
    if let Some(k) = threads {
        // Ignore a second initialization (only possible in-process, e.g. tests).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn init_threads(_threads: Option<usize>) {}

/// Creates a fresh run-stamped directory under the resolved output root.
fn prepare_run_dir(common: &CommonArgs) -> Result<PathBuf, CliError> {
    let base = common
        .out
        .clone()
        .or_else(|| std::env::var_os("PPP_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("ppp-runs"));
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0);
    for k in 0u32.. {
        let name = if k == 0 {
            format!("run-{stamp}")
        } else {
            format!("run-{stamp}-{k}")
        };
        let dir = base.join(name);
        match fs::create_dir_all(&dir) {
            Ok(()) if fs::read_dir(&dir).map(|mut d| d.next().is_none()).unwrap_or(false) => {
                return Ok(dir)
            }
            Ok(()) => continue,
            Err(e) => {
                return Err(CliError {
                    code: EXIT_DATA,
                    message: format!("cannot create output directory {}: {e}", dir.display()),
                })
            }
        }
    }
    unreachable!()
}

fn write_config(dir: &Path, resolved: &str) -> Result<(), CliError> {
    fs::write(dir.join("config.txt"), resolved).map_err(|e| CliError {
        code: EXIT_DATA,
        message: format!("cannot write config.txt: {e}"),
    })
}

fn write_file(dir: &Path, name: &str, content: &[u8]) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    fs::write(&path, content).map_err(|e| CliError {
        code: EXIT_DATA,
        message: format!("cannot write {}: {e}", path.display()),
    })?;
    Ok(path)
}

fn load_data(path: &Path) -> Result<ObservedSample, CliError> {
    Ok(ObservedSample::load_csv(path)?)
}

fn emit_report(
    dir: &Path,
    report: &PValueReport,
    resolved: String,
) -> Result<(), CliError> {
    write_config(dir, &resolved)?;
    let mut buf = Vec::new();
    report.write_csv(&mut buf)?;
    let path = write_file(dir, "pvalue.csv", &buf)?;
    if let Some(w) = &report.warning {
        eprintln!("warning: {w}");
    }
    println!(
        "{} {} {} p={:.4} (R={}, {} degenerate) -> {}",
        report.method.label(),
        report.estimator.label(),
        if report.studentized {
            "studentized"
        } else {
            "unstudentized"
        },
        report.p_value,
        report.r,
        report.n_degenerate,
        path.display()
    );
    Ok(())
}

fn run_ppp(args: PppArgs) -> Result<(), CliError> {
    init_threads(args.common.threads);
    let data = args.data.as_ref().expect("clap enforces --data");
    let sample = load_data(data)?;
    let spec = args.stat.spec(args.common.seed)?;
    let report = match args.algorithm.as_str() {
        "a" => ppp_algorithm_a(&sample, &spec, args.draws, args.burnin, args.common.seed)?,
        "b" => {
            let draws = sample_posterior(&sample, args.burnin, args.draws, args.common.seed)?;
            ppp_algorithm_b(&sample, &spec, &draws, args.inner_draws, args.common.seed)?
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown --algorithm `{other}` (expected a|b)"
            )))
        }
    };
    let dir = prepare_run_dir(&args.common)?;
    emit_report(&dir, &report, format!("{args:#?}\n"))
}

fn parse_design(text: &str) -> Result<RandomizationDesign, CliError> {
    let bad = || {
        CliError::usage(format!(
            "bad --design `{text}` (expected complete:m=<count> or bernoulli:p=<prob>)"
        ))
    };
    let (kind, param) = text.split_once(':').ok_or_else(bad)?;
    let (key, value) = param.split_once('=').ok_or_else(bad)?;
    match (kind, key) {
        ("complete", "m") => Ok(RandomizationDesign::CompleteRandomization {
            m: value.parse().map_err(|_| bad())?,
        }),
        ("bernoulli", "p") => Ok(RandomizationDesign::Bernoulli {
            p: value.parse().map_err(|_| bad())?,
        }),
        _ => Err(bad()),
    }
}

fn run_frt(args: FrtArgs) -> Result<(), CliError> {
    init_threads(args.common.threads);
    let sample = load_data(&args.data)?;
    let spec = args.stat.spec(args.common.seed)?;
    let design = parse_design(&args.design)?;
    let report = frt_pvalue(&sample, &spec, &design, args.inner_draws, args.common.seed)?;
    let dir = prepare_run_dir(&args.common)?;
    emit_report(&dir, &report, format!("{args:#?}\n"))
}

fn run_normal(args: NormalArgs) -> Result<(), CliError> {
    init_threads(args.common.threads);
    let sample = load_data(&args.data)?;
    let mut stat = args.stat.spec(args.common.seed)?;
    stat.studentized = true; // the normal approximation needs a pivot
    let report = normal_pvalue(&sample, &stat)?;
    let dir = prepare_run_dir(&args.common)?;
    emit_report(&dir, &report, format!("{args:#?}\n"))
}

fn run_simulate(args: SimArgs) -> Result<(), CliError> {
    init_threads(args.common.threads);
    let mut dgp = DgpConfig::new(args.dgp, args.n, 0);
    dgp.tau_shift = args.tau_shift;
    dgp.flip_treatment = args.flip;
    let studentized = !args.unstudentized;
    let est = args.estimator;
    let mut methods = vec![StudyMethod::ppp(
        &format!("ppp-{}", est.label()),
        est,
        studentized,
    )];
    if studentized {
        methods.push(StudyMethod::normal(&format!("normal-{}", est.label()), est));
    }
    let config = StudyConfig {
        replications: args.reps,
        r: args.draws,
        burn_in: args.burnin,
        seed: args.common.seed,
    };
    let result = run_study(&dgp, args.scenario, &methods, &config)?;
    let summary = summarize(&result);

    let dir = prepare_run_dir(&args.common)?;
    write_config(&dir, &format!("{args:#?}\n"))?;
    let mut buf = Vec::new();
    write_pvalues_csv(&result, &mut buf)?;
    write_file(&dir, "pvalues.csv", &buf)?;
    let mut buf = Vec::new();
    write_summary_csv(&summary, &mut buf)?;
    let summary_path = write_file(&dir, "summary.csv", &buf)?;
    for m in &summary.methods {
        write_file(&dir, &format!("hist-{}.svg", m.label), histogram_svg(m).as_bytes())?;
    }

    let mut line = String::new();
    for m in &summary.methods {
        let _ = write!(
            line,
            "{}: reject@0.05={:.4} ks={:.4}  ",
            m.label, m.rejection_rates[1], m.ks
        );
    }
    println!(
        "{} reps ({} failed) {}-> {}",
        summary.n_used,
        summary.n_failed,
        line,
        summary_path.display()
    );
    Ok(())
}

fn run_summarize(args: SummarizeArgs) -> Result<(), CliError> {
    let file = fs::File::open(&args.pvalues).map_err(|e| CliError {
        code: EXIT_DATA,
        message: format!("cannot open {}: {e}", args.pvalues.display()),
    })?;
    let result = read_pvalues_csv(file)?;
    let summary = summarize(&result);
    let dir = prepare_run_dir(&args.common)?;
    write_config(&dir, &format!("{args:#?}\n"))?;
    let mut buf = Vec::new();
    write_summary_csv(&summary, &mut buf)?;
    let summary_path = write_file(&dir, "summary.csv", &buf)?;
    for m in &summary.methods {
        write_file(&dir, &format!("hist-{}.svg", m.label), histogram_svg(m).as_bytes())?;
    }
    println!(
        "{} reps, {} methods -> {}",
        summary.n_used,
        summary.methods.len(),
        summary_path.display()
    );
    Ok(())
}
