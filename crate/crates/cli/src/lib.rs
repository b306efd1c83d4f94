//! Command-line front end for the `tlink` library.
//!
//! Exit codes are uniform across commands: 0 on success, 1 when an algorithm
//! or a verification fails, 2 on usage or input errors.

pub mod bench;
pub mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tlink::domination::{check_degree_bound, greedy_dominating, DominationError, Flavor};
use tlink::flows::strong_connectivity;
use tlink::linkage_pairs::{find_linkage_pair, route, LinkageError};
use tlink::linker::{link_with, verify_linkage, LinkFailure, LinkRequest, LinkerConfig, Stage};
use tlink::oracle::{
    bf_is_k_linked, bf_strong_connectivity, LinkedVerdict, OracleBudget, OracleError,
};
use tlink::Tournament;

/// A command outcome other than success.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    /// Bad flags, unreadable or malformed files, unmet preconditions.
    Input(String),
    /// An algorithm stage or a verification failed.
    Algorithm(String),
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Failure::Algorithm(_) => ExitCode::from(1),
            Failure::Input(_) => ExitCode::from(2),
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Algorithm(m) => m,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tlink",
    version,
    about = "Disjoint path linkage in highly connected tournaments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a tournament in TOURN 1 format.
    Gen(GenArgs),
    /// Print the strong connectivity of a tournament.
    Kappa(KappaArgs),
    /// Link terminal pairs by vertex-disjoint paths.
    Link(LinkArgs),
    /// Check a paths file against a tournament and a pairs file.
    Verify(VerifyArgs),
    /// Find a linkage pair and route random permutations through it.
    Lemma21(Lemma21Args),
    /// Print a greedy dominating sequence and its residual degree check.
    Domset(DomsetArgs),
    /// Brute-force ground truth for small tournaments.
    Oracle(OracleArgs),
    /// Run a seeded benchmark suite and write a tab-separated report.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Kind {
    Transitive,
    Rotational,
    Random,
    /// Quadratic-residue tournament on a prime `n = 3 mod 4`.
    Paley,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Resample random tournaments until every in- and out-degree reaches this.
    #[arg(long)]
    pub min_degree: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KappaArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Max-flow computation (the default).
    #[arg(long, conflicts_with = "brute")]
    pub exact: bool,
    /// Exhaustive search over removal sets; small tournaments only.
    #[arg(long)]
    pub brute: bool,
}

#[derive(Debug, Args)]
pub struct LinkArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub pairs: PathBuf,
    /// Skip the minimum semi-degree precondition.
    #[arg(long)]
    pub force: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub pairs: PathBuf,
    #[arg(long)]
    pub paths: PathBuf,
}

#[derive(Debug, Args)]
pub struct Lemma21Args {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 100)]
    pub perms: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FlavorArg {
    In,
    Out,
}

#[derive(Debug, Args)]
pub struct DomsetArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "in")]
    pub flavor: FlavorArg,
    #[arg(long, default_value_t = 2)]
    pub size: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Check {
    Kappa,
    Linked,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub check: Check,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = OracleBudget::default().max_n)]
    pub max_n: usize,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// One of smoke, k1, k2, forced, full.
    #[arg(long, default_value = "smoke")]
    pub suite: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write 0 in the runtime column so reports are byte-reproducible.
    #[arg(long)]
    pub no_timing: bool,
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Gen(a) => gen(a),
        Command::Kappa(a) => kappa(a),
        Command::Link(a) => link(a),
        Command::Verify(a) => verify(a),
        Command::Lemma21(a) => lemma21(a),
        Command::Domset(a) => domset(a),
        Command::Oracle(a) => oracle(a),
        Command::Bench(a) => bench_cmd(a),
    }
}

fn input(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

fn gen(a: GenArgs) -> Result<(), Failure> {
    let t = match a.kind {
        Kind::Transitive => (a.n > 0)
            .then(|| Tournament::transitive(a.n))
            .ok_or_else(|| input("n must be positive"))?,
        Kind::Rotational => Tournament::rotational(a.n).map_err(input)?,
        Kind::Paley => Tournament::quadratic_residue(a.n).map_err(input)?,
        Kind::Random if a.n == 0 => return Err(input("n must be positive")),
        Kind::Random => match a.min_degree {
            Some(floor) => {
                Tournament::random_with_min_degree(a.n, floor, a.seed, bench::MAX_ATTEMPTS)
                    .map_err(input)?
                    .0
            }
            None => Tournament::random(a.n, a.seed),
        },
    };
    if a.min_degree.is_some() && !matches!(a.kind, Kind::Random) {
        return Err(input("--min-degree applies to --kind random only"));
    }
    io::emit(a.out.as_deref(), &t.serialize())
}

fn kappa(a: KappaArgs) -> Result<(), Failure> {
    let t = io::read_tournament(&a.input)?;
    let kappa = if a.brute {
        bf_strong_connectivity(&t, &OracleBudget::default()).map_err(input)?
    } else {
        strong_connectivity(&t)
    };
    println!("{kappa}");
    Ok(())
}

fn link(a: LinkArgs) -> Result<(), Failure> {
    let t = io::read_tournament(&a.input)?;
    let req = LinkRequest::from_pairs(&io::parse_pairs(&io::read_text(&a.pairs)?)?);
    let config = if a.force {
        LinkerConfig::forced()
    } else {
        LinkerConfig::default()
    };
    match link_with(&t, &req, &config) {
        Ok(res) => {
            for r in &res.diagnostics.stages {
                eprintln!("[{}] {}", r.stage, r.summary);
            }
            verify_linkage(&t, &req, &res.paths)
                .map_err(|e| Failure::Algorithm(format!("verification: {e}")))?;
            io::emit(a.out.as_deref(), &io::format_paths(&res.paths))
        }
        Err(err) => {
            let precondition = err.stage == Stage::Precondition
                && matches!(
                    err.failure,
                    LinkFailure::Request(_) | LinkFailure::DegreeFloor { .. }
                );
            let msg = format!("stage {}: {}", err.stage, err.failure);
            Err(if precondition {
                Failure::Input(msg)
            } else {
                Failure::Algorithm(msg)
            })
        }
    }
}

fn verify(a: VerifyArgs) -> Result<(), Failure> {
    let t = io::read_tournament(&a.input)?;
    let req = LinkRequest::from_pairs(&io::parse_pairs(&io::read_text(&a.pairs)?)?);
    let paths = io::parse_paths(&io::read_text(&a.paths)?)?;
    verify_linkage(&t, &req, &paths).map_err(|e| Failure::Algorithm(format!("violation: {e}")))?;
    println!("ok: {} paths verified", paths.len());
    Ok(())
}

fn lemma21(a: Lemma21Args) -> Result<(), Failure> {
    let t = io::read_tournament(&a.input)?;
    let pair = find_linkage_pair(&t, a.m).map_err(|e| match e {
        LinkageError::ZeroSize
        | LinkageError::TooFewVertices { .. }
        | LinkageError::DegreeFloor { .. } => input(e),
        other => Failure::Algorithm(other.to_string()),
    })?;
    println!("sources: {:?}", pair.sources);
    println!("sinks: {:?}", pair.sinks);
    println!("mode: {}", pair.mode.name());
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut sigma: Vec<usize> = (0..a.m).collect();
    let mut failures = 0usize;
    for trial in 0..a.perms {
        sigma.shuffle(&mut rng);
        if let Err(e) = route(&t, &pair, &sigma) {
            failures += 1;
            eprintln!("permutation {trial} {sigma:?}: {e}");
        }
    }
    println!("routed: {}/{}", a.perms - failures, a.perms);
    if failures > 0 {
        return Err(Failure::Algorithm(format!(
            "{failures} permutations failed"
        )));
    }
    Ok(())
}

fn domset(a: DomsetArgs) -> Result<(), Failure> {
    let t = io::read_tournament(&a.input)?;
    let flavor = match a.flavor {
        FlavorArg::In => Flavor::In,
        FlavorArg::Out => Flavor::Out,
    };
    let seq = greedy_dominating(&t, &t.all_vertices(), a.size, flavor).map_err(|e| match e {
        DominationError::Exhausted { .. } => Failure::Algorithm(e.to_string()),
        other => input(other),
    })?;
    let holds = check_degree_bound(&t, &seq);
    let ids: Vec<String> = seq.verts.iter().map(usize::to_string).collect();
    println!("sequence: {}", ids.join(" "));
    println!("|E|: {}", seq.residual.len());
    println!("bound: {}", if holds { "holds" } else { "fails" });
    if holds {
        Ok(())
    } else {
        Err(Failure::Algorithm("residual degree bound fails".into()))
    }
}

fn oracle(a: OracleArgs) -> Result<(), Failure> {
    let t = io::read_tournament(&a.input)?;
    let budget = OracleBudget {
        max_n: a.max_n,
        ..OracleBudget::default()
    };
    let oracle_err = |e: OracleError| input(e);
    match a.check {
        Check::Kappa => println!(
            "{}",
            bf_strong_connectivity(&t, &budget).map_err(oracle_err)?
        ),
        Check::Linked => match bf_is_k_linked(&t, a.k, &budget).map_err(oracle_err)? {
            LinkedVerdict::Linked => println!("linked"),
            LinkedVerdict::NotLinked { sources, sinks } => {
                println!("not linked: sources {sources:?} sinks {sinks:?}")
            }
        },
    }
    Ok(())
}

fn bench_cmd(a: BenchArgs) -> Result<(), Failure> {
    let specs = bench::suite_specs(&a.suite, a.seed).ok_or_else(|| {
        input(format!(
            "unknown suite {:?} (expected one of {})",
            a.suite,
            bench::SUITES.join(", ")
        ))
    })?;
    let records = bench::run_suite(&specs, !a.no_timing).map_err(Failure::Algorithm)?;
    let ok = records.iter().filter(|r| r.succeeded()).count();
    eprintln!("suite {}: {ok}/{} trials linked", a.suite, records.len());
    io::emit(a.out.as_deref(), &bench::report(&records))
}
