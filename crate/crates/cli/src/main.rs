mod output;
mod reproduce;
mod source;

use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use netdoe::automorph::count_orbits_bruteforce;
use netdoe::search::SearchError;
use netdoe::{
    find_automorphisms, search, AutomorphError, Criterion, ModelError, ModelSpec, NetworkError, SearchConfig, Validity,
};

use output::Format;
use reproduce::ReproduceArgs;
use source::{InputError, SourceArgs};

const EXIT_INVALID_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;

/// Optimal experimental designs on networks, with automorphism-based
/// pruning of equivalent designs.
///
/// Exit status: 0 on success, 2 on invalid input, 3 when --max-designs
/// stopped a search early (the partial report is still printed).
#[derive(Parser, Debug)]
#[command(name = "netdoe", version, verbatim_doc_comment)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search for a design minimising the criterion.
    Search(SearchArgs),
    /// Automorphism group of a network.
    Autos(AutosArgs),
    /// Count design orbits by brute force (small networks only).
    Orbits(OrbitsArgs),
    /// Re-run a published comparison table and print it as CSV.
    Reproduce(ReproduceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    Exhaustive,
    #[value(alias = "coordinate-descent")]
    Cd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CriterionArg {
    #[value(name = "As")]
    As,
    #[value(name = "Ds")]
    Ds,
}

/// When a design counts as valid (see the library's `Validity`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ValidityArg {
    /// Direct-effect and free network-effect contrasts estimable.
    NetworkContrasts,
    /// Direct-effect contrasts estimable.
    Estimable,
    /// Nonsingular information matrix.
    FullRank,
}

impl From<ValidityArg> for Validity {
    fn from(v: ValidityArg) -> Self {
        match v {
            ValidityArg::NetworkContrasts => Validity::NetworkContrasts,
            ValidityArg::Estimable => Validity::Estimable,
            ValidityArg::FullRank => Validity::FullRank,
        }
    }
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[command(flatten)]
    source: SourceArgs,

    /// Number of treatments m (at least 2).
    #[arg(long, short = 'm', value_name = "M")]
    treatments: usize,

    #[arg(long, value_enum, default_value_t = AlgorithmArg::Exhaustive)]
    algorithm: AlgorithmArg,

    /// Evaluate every design instead of one per automorphism orbit.
    #[arg(long)]
    no_automorphisms: bool,

    /// Enumerate all m^n labelings instead of first-occurrence forms.
    #[arg(long)]
    no_label_symmetry: bool,

    /// Random starts for coordinate descent.
    #[arg(long, default_value_t = 100)]
    restarts: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long, value_enum, ignore_case = true, default_value_t = CriterionArg::As)]
    criterion: CriterionArg,

    #[arg(long, value_enum, default_value_t = ValidityArg::NetworkContrasts)]
    validity: ValidityArg,

    /// Count invalid designs as evaluations too.
    #[arg(long)]
    count_invalid: bool,

    /// Stop after this many candidates (exhaustive search); exits with 3.
    #[arg(long, value_name = "N")]
    max_designs: Option<u64>,

    /// Known optimum; fills `efficiency` as reference / best value.
    #[arg(long, value_name = "VALUE")]
    reference: Option<f64>,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, value_name = "W")]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct AutosArgs {
    #[command(flatten)]
    source: SourceArgs,

    /// Treatment count used to number block pseudo-treatments of layouts.
    #[arg(long, short = 'm', value_name = "M", default_value_t = 2)]
    treatments: usize,

    /// Print every element in cycle notation.
    #[arg(long)]
    list: bool,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct OrbitsArgs {
    #[command(flatten)]
    source: SourceArgs,

    #[arg(long, short = 'm', value_name = "M")]
    treatments: usize,
}

fn cmd_search(args: &SearchArgs, out: &mut impl Write) -> Result<ExitCode> {
    let net = args.source.load(args.treatments)?;
    let criterion = match args.criterion {
        CriterionArg::As => Criterion::As,
        CriterionArg::Ds => Criterion::Ds,
    };
    let spec = ModelSpec::new(&net, args.treatments, criterion)?.with_validity(args.validity.into());
    let mut config = match args.algorithm {
        AlgorithmArg::Exhaustive => SearchConfig::exhaustive(),
        AlgorithmArg::Cd => SearchConfig::coordinate_descent(args.restarts, args.seed),
    };
    config.seed = args.seed;
    config.use_automorphisms = !args.no_automorphisms;
    config.use_label_symmetry = !args.no_label_symmetry;
    config.count_invalid_as_eval = args.count_invalid;
    config.max_designs = args.max_designs;
    config.workers = args.workers;

    let mut report = search(&net, &spec, &config)?;
    if let Some(reference) = args.reference {
        report = report.with_reference(reference);
    }
    out.write_all(output::render(&report, args.format)?.as_bytes())?;
    Ok(if report.partial {
        ExitCode::from(EXIT_BUDGET)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_autos(args: &AutosArgs, out: &mut impl Write) -> Result<ExitCode> {
    let net = args.source.load(args.treatments)?;
    let group = find_automorphisms(&net)?;
    let elements: Vec<String> = group.elements().iter().map(ToString::to_string).collect();
    match args.format {
        Format::Json => {
            let mut value = serde_json::json!({ "size": group.size() });
            if args.list {
                value["elements"] = serde_json::json!(elements);
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?;
        }
        Format::Csv => {
            writeln!(out, "size\n{}", group.size())?;
        }
        Format::Text => {
            writeln!(out, "automorphisms: {}", group.size())?;
            if args.list {
                for e in &elements {
                    writeln!(out, "{e}")?;
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_orbits(args: &OrbitsArgs, out: &mut impl Write) -> Result<ExitCode> {
    let net = args.source.load(args.treatments)?;
    ModelSpec::new(&net, args.treatments, Criterion::As)?;
    let orbits = count_orbits_bruteforce(&net, args.treatments)?;
    writeln!(out, "orbits: {orbits}")?;
    Ok(ExitCode::SUCCESS)
}

/// Exit status for a failed run.
fn failure_code(err: &anyhow::Error) -> u8 {
    let invalid_input = err.chain().any(|cause| {
        cause.is::<InputError>()
            || cause.is::<NetworkError>()
            || cause.is::<io::Error>()
            || cause
                .downcast_ref::<ModelError>()
                .is_some_and(|e| !matches!(e, ModelError::Decomposition))
            || cause.is::<AutomorphError>()
            || cause.downcast_ref::<SearchError>().is_some_and(|e| match e {
                SearchError::Model(m) => !matches!(m, ModelError::Decomposition),
                SearchError::Automorph(_) | SearchError::Config(_) => true,
                SearchError::Workers(_) => false,
            })
    });
    if invalid_input {
        EXIT_INVALID_INPUT
    } else {
        1
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match &cli.command {
        Command::Search(args) => cmd_search(args, &mut out),
        Command::Autos(args) => cmd_autos(args, &mut out),
        Command::Orbits(args) => cmd_orbits(args, &mut out),
        Command::Reproduce(args) => {
            reproduce::run(args, &mut out).context("reproducing table")?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(failure_code(&err))
        }
    }
}
