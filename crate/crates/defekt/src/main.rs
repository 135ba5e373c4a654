//! `defekt`: exact computations in valued fields from the command line.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use defekt::cli::{self, Config};
use defekt::error::Error;
use defekt::scalars::{Prime, Rational};

#[derive(Parser)]
#[command(
    name = "defekt",
    version,
    about = "Exact arithmetic in valued fields: series, ramified p-adics, \
             Newton polygons, root lifting, towers and defect bookkeeping"
)]
struct CliArgs {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Residue characteristic (a prime).
    #[arg(short = 'p', long = "prime", default_value_t = 2, global = false)]
    prime: u64,
    /// Truncation cap as a rational string, e.g. "8" or "-1/64".
    /// Falls back to DEFEKT_PREC_DEFAULT, then to 8.
    #[arg(long = "prec")]
    prec: Option<String>,
    /// Tower / partial-sum depth.
    #[arg(short = 'k', long = "depth", default_value_t = 5)]
    depth: u32,
    /// Emit JSON (sorted keys) instead of text.
    #[arg(long = "json", default_value_t = false)]
    json: bool,
    /// Seed for randomized property runs.
    #[arg(long = "seed", default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an expression in F_p((t^Q)) or the ramified p-adic domain.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Expression, e.g. "v(t^(-1/2) + t^(-1/4))" or "inv(1+t)".
        expr: String,
    },
    /// Newton polygon of a polynomial in X: slopes and certified root
    /// valuations.
    Np {
        #[command(flatten)]
        common: Common,
        /// Polynomial source, e.g. "X^3 - X - inv(t)".
        poly: String,
    },
    /// Lift a root by Newton iteration from a start value.
    Lift {
        #[command(flatten)]
        common: Common,
        /// Polynomial source containing X.
        poly: String,
        /// Start value expression.
        start: String,
    },
    /// Classify a distance-set cut as Independent or Dependent.
    Classify {
        #[command(flatten)]
        common: Common,
        /// Cut literal: empty | lt:q | le:q | all.
        cut: String,
    },
    /// Run a catalog example and report its checks.
    Example {
        #[command(flatten)]
        common: Common,
        /// Example id (see `defekt list`).
        id: Option<String>,
        /// Run every catalog entry.
        #[arg(long = "all", default_value_t = false)]
        all: bool,
    },
    /// List the catalog examples.
    List {
        #[command(flatten)]
        common: Common,
    },
}

fn build_config(common: &Common) -> Result<Config, Error> {
    let prime = Prime::new(common.prime)?;
    let precision = match &common.prec {
        Some(s) => s.parse::<Rational>()?,
        None => match std::env::var("DEFEKT_PREC_DEFAULT") {
            Ok(s) => s.parse::<Rational>()?,
            Err(_) => Rational::integer(8),
        },
    };
    Ok(Config {
        prime,
        precision,
        depth: common.depth,
        json: common.json,
        seed: common.seed,
    })
}

fn run() -> Result<cli::CmdOutput, Error> {
    let args = CliArgs::parse();
    match &args.command {
        Command::Eval { common, expr } => cli::eval_cmd(&build_config(common)?, expr),
        Command::Np { common, poly } => cli::np_cmd(&build_config(common)?, poly),
        Command::Lift {
            common,
            poly,
            start,
        } => cli::lift_cmd(&build_config(common)?, poly, start),
        Command::Classify { common, cut } => cli::classify_cmd(&build_config(common)?, cut),
        Command::Example { common, id, all } => {
            cli::example_cmd(&build_config(common)?, id.as_deref(), *all)
        }
        Command::List { common } => cli::list_cmd(&build_config(common)?),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(out) => {
            if let Err(e) = write_stdout(&out.text) {
                // a closed pipe (e.g. `defekt list | head`) is not a failure
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
            if out.all_pass {
                ExitCode::from(0)
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn write_stdout(text: &str) -> std::io::Result<()> {
    use std::io::Write;
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    lock.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        lock.write_all(b"\n")?;
    }
    lock.flush()
}
