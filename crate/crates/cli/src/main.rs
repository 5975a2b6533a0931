//! `catscore`: rank features of a two-group study by cat scores, run
//! simulation studies and emit Q-Q diagnostic data.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use catscore_core::catscore::{correlation_neighborhoods, ScoreMethod, DEFAULT_GROUP_THRESHOLD};
use catscore_core::estimators::shrink_correlation;
use catscore_core::io::{
    load_dataset, read_correlation_matrix, read_ranked_table, write_study_table, QqData,
    RankedTable,
};
use catscore_core::pipeline::{score_dataset, ScoreOptions};
use catscore_core::simharness::{GeneratorSpec, ScenarioSpec, Study, StudyMethod};
use catscore_core::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "catscore", version, about = "Feature ranking with correlation-adjusted t-scores")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score and rank the features of a labeled dataset.
    Score(ScoreArgs),
    /// Simulate a ranking study and write mean ppv and power per cutoff.
    Simulate(SimulateArgs),
    /// Normal Q-Q data for a ranked score table.
    Qq(QqArgs),
    /// Size and members of each feature's correlation neighborhood.
    Neighborhoods(NeighborhoodArgs),
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Tab-separated matrix: header of sample ids, one row per feature.
    #[arg(long)]
    data: PathBuf,
    /// Two-column file mapping sample id to group 1 or 2.
    #[arg(long)]
    labels: PathBuf,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[command(flatten)]
    input: DataArgs,
    /// fold, t, shrink-t, cat, shrink-cat or grouped-cat.
    #[arg(long, default_value = "shrink-cat", value_parser = parse_score_method)]
    method: ScoreMethod,
    /// Minimum |correlation| for two features to share a neighborhood.
    #[arg(long, default_value_t = DEFAULT_GROUP_THRESHOLD, value_parser = parse_threshold)]
    group_threshold: f64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// A (identity), B (autoregressive blocks), C (two blocks) or file:<path>.
    #[arg(long, value_parser = parse_scenario)]
    scenario: ScenarioArg,
    /// Number of features; defaults to 1000, or the matrix size for file scenarios.
    #[arg(long)]
    p: Option<usize>,
    /// Number of differential features (the first ones).
    #[arg(long, default_value_t = 100)]
    de: usize,
    /// Samples in group 1.
    #[arg(long, default_value_t = 8)]
    n1: usize,
    /// Samples in group 2.
    #[arg(long, default_value_t = 8)]
    n2: usize,
    /// Degrees of freedom of the variance prior.
    #[arg(long, default_value_t = 4.0)]
    d0: f64,
    /// Scale of the variance prior.
    #[arg(long, default_value_t = 4.0)]
    s0sq: f64,
    /// Number of simulated datasets.
    #[arg(long, default_value_t = 500)]
    replicates: usize,
    /// Base seed; replicate r draws from its own streams of this seed.
    #[arg(long)]
    seed: u64,
    /// Comma-separated ranking methods.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "t,shrink-t,shrink-cat,oracle-cat,random",
        value_parser = parse_study_method
    )]
    methods: Vec<StudyMethod>,
    /// Minimum |correlation| for grouped methods to share a neighborhood.
    #[arg(long, default_value_t = DEFAULT_GROUP_THRESHOLD, value_parser = parse_threshold)]
    group_threshold: f64,
    /// Worker threads; all cores when omitted. Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct QqArgs {
    /// Ranked table written by `score`.
    #[arg(long, alias = "data")]
    scores: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct NeighborhoodArgs {
    #[command(flatten)]
    input: DataArgs,
    /// Minimum |correlation| for two features to share a neighborhood.
    #[arg(long, default_value_t = DEFAULT_GROUP_THRESHOLD, value_parser = parse_threshold)]
    group_threshold: f64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
enum ScenarioArg {
    A,
    B,
    C,
    File(PathBuf),
}

fn parse_score_method(s: &str) -> Result<ScoreMethod, String> {
    match s.parse::<ScoreMethod>().map_err(|e| e.to_string())? {
        ScoreMethod::OracleCat => Err("oracle-cat needs the true correlation and is only available in `simulate`".into()),
        m => Ok(m),
    }
}

fn parse_study_method(s: &str) -> Result<StudyMethod, String> {
    s.trim().parse().map_err(|e: Error| e.to_string())
}

fn parse_threshold(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if t > 0.0 && t <= 1.0 {
        Ok(t)
    } else {
        Err(format!("threshold {t} must lie in (0, 1]"))
    }
}

fn parse_scenario(s: &str) -> Result<ScenarioArg, String> {
    match s {
        "A" | "a" => Ok(ScenarioArg::A),
        "B" | "b" => Ok(ScenarioArg::B),
        "C" | "c" => Ok(ScenarioArg::C),
        _ => match s.strip_prefix("file:") {
            Some(path) if !path.is_empty() => Ok(ScenarioArg::File(path.into())),
            _ => Err(format!("unknown scenario '{s}' (expected A, B, C or file:<path>)")),
        },
    }
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_DATA };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn emit(out: Option<&Path>, contents: &str) -> Result<(), Failure> {
    let result = match out {
        Some(path) => fs::write(path, contents).map_err(|e| (path.display().to_string(), e)),
        None => std::io::stdout()
            .lock()
            .write_all(contents.as_bytes())
            .map_err(|e| ("standard output".to_string(), e)),
    };
    result.map_err(|(target, e)| Failure {
        code: EXIT_DATA,
        message: format!("{target}: {e}"),
    })
}

fn cmd_score(args: &ScoreArgs) -> Result<(), Failure> {
    let data = load_dataset(&args.input.data, &args.input.labels)?;
    let options = ScoreOptions {
        group_threshold: Some(args.group_threshold),
        oracle: None,
    };
    let scored = score_dataset(&data, args.method, &options)?;
    let sizes = scored.neighborhood_sizes();
    let table = RankedTable::from_scores(&scored.scores, sizes.as_deref())?;
    emit(args.out.as_deref(), &table.to_tsv())
}

fn generator_spec(args: &SimulateArgs, p: usize) -> Result<GeneratorSpec, Failure> {
    let spec = GeneratorSpec {
        p,
        de_count: args.de,
        d0: args.d0,
        s0_sq: args.s0sq,
        n1: args.n1,
        n2: args.n2,
        seed: args.seed,
        replicates: args.replicates,
    };
    spec.validate().map_err(|e| usage(e.to_string()))?;
    Ok(spec)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), Failure> {
    let scenario = match &args.scenario {
        ScenarioArg::File(path) => {
            let p = match args.p {
                Some(p) => p,
                None => read_correlation_matrix(path)?.nrows(),
            };
            ScenarioSpec::file(p, path)
        }
        other => {
            let p = args.p.unwrap_or(1000);
            match other {
                ScenarioArg::A => ScenarioSpec::identity(p),
                ScenarioArg::B => ScenarioSpec::autoregressive(p),
                _ => ScenarioSpec::two_blocks(p, args.de),
            }
        }
    };
    let spec = generator_spec(args, scenario.p)?;
    let study = Study::new(spec, &scenario, &args.methods, Some(args.group_threshold))?;
    let curves = match args.threads {
        Some(0) => return Err(usage("--threads must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| usage(format!("cannot start {n} threads: {e}")))?
            .install(|| study.run())?,
        None => study.run()?,
    };
    emit(args.out.as_deref(), &write_study_table(&curves))
}

fn cmd_qq(args: &QqArgs) -> Result<(), Failure> {
    let table = read_ranked_table(&args.scores)?;
    let qq = QqData::from_scores(&table.scores())?;
    emit(args.out.as_deref(), &qq.to_tsv())
}

fn cmd_neighborhoods(args: &NeighborhoodArgs) -> Result<(), Failure> {
    let data = load_dataset(&args.input.data, &args.input.labels)?;
    let corr = shrink_correlation(&data)?;
    let sets = correlation_neighborhoods(&corr, args.group_threshold)?;
    let names = data.feature_names();
    let mut out = String::from("feature\tneighborhood_size\tmembers\n");
    for (i, set) in sets.iter().enumerate() {
        let members: Vec<&str> = set.members().iter().map(|&j| names[j].as_str()).collect();
        writeln!(out, "{}\t{}\t{}", names[i], set.len(), members.join(",")).expect("writing to a string");
    }
    emit(args.out.as_deref(), &out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Score(args) => cmd_score(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Qq(args) => cmd_qq(args),
        Command::Neighborhoods(args) => cmd_neighborhoods(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
