//! `csm`: verify, build and search for compatibility support mappings,
//! witness mappings and observables on finite and interval effect algebras.
//!
//! Exit codes: 0 holds, 1 verified violation, 2 input error, 3 inconclusive.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use csm_core::io::{read_json, Algebra, AlgebraFile};
use csm_core::observable::{DEFAULT_SAMPLES, DEFAULT_SEED};
use csm_core::search::SearchBudget;

use commands::{SearchQuery, Settings};
use report::{emit, Format, InputError, Report};

#[derive(Parser)]
#[command(
    name = "csm",
    version,
    about = "Compatibility support mappings on effect algebras"
)]
struct Cli {
    /// Report format
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,

    /// Seed for sampled observable checks
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Cap on |S|, counting the unit
    #[arg(long, global = true, default_value_t = 5)]
    max_s: usize,

    /// Disjoint pairs sampled when a Boolean domain is too large to sweep
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check (E1)-(E4) for an algebra file, and optionally the MV property
    Validate {
        #[arg(long)]
        algebra: PathBuf,
        /// Also check that the algebra is an MV-effect algebra
        #[arg(long)]
        mv: bool,
    },
    /// Check (a)-(e), and (e*) with --strong, for a mapping file
    VerifyCsm {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        subset: Option<PathBuf>,
        #[arg(long)]
        csm: PathBuf,
        #[arg(long)]
        strong: bool,
    },
    /// Build the observable on the limit algebra and a certificate that S lies in its range
    Coexist {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        subset: Option<PathBuf>,
        #[arg(long, required_unless_present = "check")]
        csm: Option<PathBuf>,
        /// Where to write the certificate
        #[arg(long)]
        out: Option<PathBuf>,
        /// Re-check an existing certificate instead of building one
        #[arg(long, conflicts_with_all = ["csm", "out"])]
        check: Option<PathBuf>,
    },
    /// Build a strong mapping from an observable whose range contains S
    Reverse {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        observable: PathBuf,
        #[arg(long)]
        subset: PathBuf,
        /// Where to write the mapping
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Derive the witness mapping of a mapping and compare D with D_β
    Witness {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        subset: Option<PathBuf>,
        #[arg(long)]
        csm: PathBuf,
        /// Check this witness file instead of the derived one
        #[arg(long)]
        beta: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Backtracking search for a mapping or witness on a finite algebra
    Search {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, required_unless_present = "extend")]
        subset: Option<PathBuf>,
        #[arg(long, conflicts_with_all = ["witness", "extend"])]
        strong: bool,
        /// Search for a witness mapping instead
        #[arg(long, conflicts_with = "extend")]
        witness: bool,
        /// Search for a mapping whose tops are the given witness
        #[arg(long)]
        extend: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000_000)]
        budget_nodes: u64,
        /// Wall-clock limit in seconds
        #[arg(long)]
        time_limit: Option<f64>,
        /// Where to write a found object
        #[arg(long)]
        out: Option<PathBuf>,
        /// Append the JSON-lines result record to this file
        #[arg(long)]
        log: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::VerifyCsm { .. } => "verify-csm",
            Command::Coexist { .. } => "coexist",
            Command::Reverse { .. } => "reverse",
            Command::Witness { .. } => "witness",
            Command::Search { .. } => "search",
        }
    }
}

macro_rules! with_algebra {
    ($algebra:expr, $a:ident => $body:expr) => {
        match $algebra {
            Algebra::Table($a) => $body,
            Algebra::Tuple($a) => $body,
            Algebra::MvChainProduct($a) => $body,
        }
    };
}

fn load(path: &std::path::Path) -> Result<Algebra, InputError> {
    let file: AlgebraFile = read_json(path)?;
    Ok(file.load()?)
}

fn run(command: Command, settings: &Settings) -> Result<Report, InputError> {
    match command {
        Command::Validate { algebra, mv } => match read_json::<AlgebraFile>(&algebra)? {
            AlgebraFile::Table(desc) => commands::validate_table(&desc, mv),
            file => match file.load()? {
                Algebra::Tuple(a) => commands::validate_builtin("[0,1]^n", &a, mv),
                Algebra::MvChainProduct(a) => {
                    commands::validate_builtin("product of MV chains", &a, mv)
                }
                Algebra::Table(_) => unreachable!("table files are handled above"),
            },
        },
        Command::VerifyCsm {
            algebra,
            subset,
            csm,
            strong,
        } => with_algebra!(load(&algebra)?, a => {
            commands::verify_csm_cmd(&a, &csm, subset.as_deref(), strong, settings)
        }),
        Command::Coexist {
            algebra,
            subset,
            csm,
            out,
            check,
        } => with_algebra!(load(&algebra)?, a => match (&check, &csm) {
            (Some(cert), _) => commands::check_certificate(&a, cert, settings),
            (None, Some(csm)) => commands::coexist(&a, csm, subset.as_deref(), out.as_deref(), settings),
            (None, None) => report::input_error("--csm or --check is required"),
        }),
        Command::Reverse {
            algebra,
            observable,
            subset,
            out,
        } => with_algebra!(load(&algebra)?, a => {
            commands::reverse(&a, &observable, Some(&subset), out.as_deref(), settings)
        }),
        Command::Witness {
            algebra,
            subset,
            csm,
            beta,
            out,
        } => with_algebra!(load(&algebra)?, a => {
            commands::witness(&a, &csm, subset.as_deref(), beta.as_deref(), out.as_deref(), settings)
        }),
        Command::Search {
            algebra,
            subset,
            strong,
            witness,
            extend,
            budget_nodes,
            time_limit,
            out,
            log,
        } => {
            let time_limit = match time_limit {
                Some(secs) if !(secs.is_finite() && secs > 0.0) => {
                    return report::input_error("--time-limit must be a positive number of seconds")
                }
                other => other.map(Duration::from_secs_f64),
            };
            let budget = SearchBudget {
                max_nodes: budget_nodes,
                time_limit,
            };
            let query = match (&extend, witness) {
                (Some(beta), _) => SearchQuery::Extend(beta),
                (None, true) => SearchQuery::Witness,
                (None, false) => SearchQuery::Csm { strong },
            };
            with_algebra!(load(&algebra)?, a => {
                commands::search_cmd(&a, subset.as_deref(), query, &budget, out.as_deref(), log.as_deref(), settings)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let settings = Settings {
        max_s: cli.max_s,
        samples: cli.samples,
        seed: cli.seed,
    };
    let name = cli.command.name();
    emit(name, cli.format, run(cli.command, &settings))
}
