//! `polyhom`: decide polymorphism-homogeneity of finite relational structures.
//!
//! Exit status is 0 when a verdict was computed, 1 when a search ran out of
//! budget before reaching one, and 2 on any input error, including a report
//! whose certificates fail re-verification.

mod commands;
mod report;
mod suite;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{ArgGroup, Args, Parser, Subcommand};
use polyhom::engine::SearchLimits;
use polyhom::gen::GenFamily;
use polyhom::model::Family;

use crate::report::Outcome;

#[derive(Parser)]
#[command(
    name = "polyhom",
    version,
    about = "Certified polymorphism-homogeneity checks for finite relational structures"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Global {
    /// Print a JSON report instead of text
    #[arg(long, global = true)]
    pub json: bool,
    /// Omit timing fields from JSON reports, making them byte-reproducible
    #[arg(long, global = true)]
    pub no_timing: bool,
    /// Node budget of each extension search
    #[arg(long, global = true, env = "POLYHOM_NODE_BUDGET", value_parser = clap::value_parser!(u64).range(1..))]
    pub node_budget: Option<u64>,
    /// Wall-clock budget of each extension search, in seconds
    #[arg(long, global = true, env = "POLYHOM_WALL_SECS", value_parser = parse_secs)]
    pub wall_secs: Option<f64>,
    /// Largest power exponent accepted by `check-kph`, `pol` and `inv`
    #[arg(long, global = true, default_value_t = 6)]
    pub max_k: usize,
    /// Largest relation arity accepted by `inv`
    #[arg(long, global = true, default_value_t = 4)]
    pub max_m: usize,
}

impl Global {
    pub fn limits(&self) -> SearchLimits {
        let mut limits = SearchLimits::default();
        if let Some(n) = self.node_budget {
            limits = limits.with_nodes(n);
        }
        if let Some(s) = self.wall_secs {
            limits = limits.with_wall(Duration::from_secs_f64(s));
        }
        limits
    }
}

fn parse_secs(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number of seconds"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err("the wall budget must be positive".into())
    }
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: polyhom::Error| e.to_string())
}

fn parse_gen_family(s: &str) -> Result<GenFamily, String> {
    s.parse().map_err(|e: polyhom::Error| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Is every local homomorphism extendable to an endomorphism?
    CheckHh { file: PathBuf },
    /// Is every k-ary local polymorphism extendable?
    CheckKph {
        file: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Decide polymorphism-homogeneity with a certificate
    DecidePh { file: PathBuf },
    /// Search for a near-unanimity polymorphism
    Nu {
        file: PathBuf,
        #[arg(long)]
        arity: usize,
    },
    /// List the k-ary polymorphisms
    Pol {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        /// Stop after this many
        #[arg(long, default_value_t = 1000)]
        cap: usize,
    },
    /// The m-ary relations invariant under all polymorphisms of arity at most k
    Inv {
        file: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Closure of a relation under all polymorphisms
    Gamma {
        file: PathBuf,
        /// Relation-only `.rel` file
        #[arg(long)]
        tuples: PathBuf,
    },
    /// Is a relation primitive-positive definable?
    Pp {
        file: PathBuf,
        /// Relation-only `.rel` file
        #[arg(long)]
        relation: PathBuf,
    },
    /// Classify a graph, poset, strict poset or equivalence lattice
    Classify {
        file: PathBuf,
        /// graph | poset | strict | eqlattice
        #[arg(long, value_parser = parse_family)]
        family: Family,
    },
    /// Compare the generic decision with classification over a generated suite,
    /// or re-check the certificates embedded in a JSON report
    #[command(group(ArgGroup::new("mode").required(true).args(["suite", "verify_certificates"])))]
    Crosscheck {
        /// n2-binary | graph | poset | strict | eqlattice
        #[arg(long, value_parser = parse_gen_family)]
        suite: Option<GenFamily>,
        /// Carrier size of the suite's structures
        #[arg(long, default_value_t = 3)]
        size: usize,
        /// JSON report written by `decide-ph`, `classify` or `crosscheck`
        #[arg(long)]
        verify_certificates: Option<PathBuf>,
    },
    /// Generate structures as a `.rel` stream
    #[command(group(ArgGroup::new("mode").required(true).args(["all", "count"])))]
    Gen {
        /// graph | poset | strict | eqlattice | n2-binary
        #[arg(long, value_parser = parse_gen_family)]
        family: GenFamily,
        #[arg(long)]
        size: usize,
        /// Every labeled instance
        #[arg(long)]
        all: bool,
        /// This many seeded random instances
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::CheckHh { .. } => "check-hh",
            Command::CheckKph { .. } => "check-kph",
            Command::DecidePh { .. } => "decide-ph",
            Command::Nu { .. } => "nu",
            Command::Pol { .. } => "pol",
            Command::Inv { .. } => "inv",
            Command::Gamma { .. } => "gamma",
            Command::Pp { .. } => "pp",
            Command::Classify { .. } => "classify",
            Command::Crosscheck { .. } => "crosscheck",
            Command::Gen { .. } => "gen",
        }
    }
}

fn dispatch(command: &Command, g: &Global) -> Result<Outcome, report::CliError> {
    use commands::*;
    match command {
        Command::CheckHh { file } => check_hh(file, g),
        Command::CheckKph { file, k } => check_kph(file, *k, g),
        Command::DecidePh { file } => decide(file, g),
        Command::Nu { file, arity } => nu(file, *arity, g),
        Command::Pol { file, k, cap } => pol(file, *k, *cap, g),
        Command::Inv { file, m, k } => inv(file, *m, *k, g),
        Command::Gamma { file, tuples } => gamma(file, tuples, g),
        Command::Pp { file, relation } => pp(file, relation, g),
        Command::Classify { file, family } => classify(file, *family, g),
        Command::Crosscheck {
            suite: Some(family),
            size,
            ..
        } => suite::run_suite(*family, *size, g),
        Command::Crosscheck {
            verify_certificates: Some(path),
            ..
        } => suite::verify_report(path, g),
        Command::Crosscheck { .. } => unreachable!("clap requires a mode"),
        Command::Gen {
            family,
            size,
            count,
            seed,
            ..
        } => generate(*family, *size, *count, *seed, g),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match dispatch(&cli.command, &cli.global) {
        Ok(outcome) => {
            let code = outcome.exit;
            report::emit(cli.command.name(), outcome, &cli.global, start.elapsed());
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
