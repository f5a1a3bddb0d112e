use std::path::PathBuf;
use std::process::exit;

use clap::{Parser, Subcommand};

use relcon::cli::{self, CliReport};
use relcon::linalg::TolerancePolicy;

#[derive(Parser)]
#[command(
    name = "relcon",
    version,
    about = "Structural controllability analysis and weight design for networked relative-coupling systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for every random quantity in the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit the machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Override the relative singular-value cutoff for rank decisions.
    #[arg(long = "tol-rank", global = true)]
    tol_rank: Option<f64>,
    /// Override the absolute eigenvalue matching radius.
    #[arg(long = "tol-eig", global = true)]
    tol_eig: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide structural controllability of a model document.
    Analyze {
        /// Path to the model JSON.
        model: PathBuf,
    },
    /// Construct interaction weights for a SISO model.
    Design {
        model: PathBuf,
        /// Write the designed weights as a flat "i,j" -> weight JSON map.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo (or pinned single-point) numerical verification.
    Verify {
        model: PathBuf,
        /// Number of random weight draws.
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Weights file pinning exact values ("i,j[,k]" -> weight).
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Write a built-in example model (msd, tanks, power).
    Example {
        name: String,
        /// Number of subsystems.
        #[arg(long = "n", default_value_t = 3)]
        n: usize,
        /// Output path (defaults to "<name><n>.json").
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let args = Cli::parse();
    let mut tol = TolerancePolicy::default();
    if let Some(v) = args.tol_rank {
        tol.rank_rel_tol = v;
    }
    if let Some(v) = args.tol_eig {
        tol.eig_match_tol = v;
    }
    let outcome: relcon::Result<CliReport> = match &args.command {
        Command::Analyze { model } => cli::cmd_analyze(model, args.seed, tol),
        Command::Design { model, out } => cli::cmd_design(model, args.seed, tol, out.as_deref()),
        Command::Verify {
            model,
            trials,
            weights,
        } => cli::cmd_verify(model, *trials, args.seed, tol, weights.as_deref()),
        Command::Example { name, n, out } => {
            cli::cmd_example(name, *n, args.seed, tol, out.as_deref())
        }
    };
    match outcome {
        Ok(report) => {
            if args.json {
                match report.render_json() {
                    Ok(text) => println!("{text}"),
                    Err(err) => {
                        eprintln!("error: {err}");
                        exit(3);
                    }
                }
            } else {
                print!("{}", report.render_text());
            }
            exit(report.exit_code());
        }
        Err(err) => {
            eprintln!("error: {err}");
            exit(cli::error_exit_code(&err));
        }
    }
}
