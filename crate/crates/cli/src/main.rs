mod commands;
mod docs;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Report;
use error::CliError;

#[derive(Parser)]
#[command(name = "zink", version, about = "Zink rings, Dieudonné displays and their points")]
struct Cli {
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Precision override; its meaning depends on the subcommand.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Also write the JSON report here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a suite of randomized and exhaustive checks.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Ring spec file; defaults to a small built-in list.
        #[arg(long)]
        ring: Option<PathBuf>,
    },
    /// Coordinates of u0 over Z/p^precision.
    U0 {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 4)]
        len: usize,
    },
    /// Ghost components of a Witt vector.
    Ghost {
        /// Ring spec file; defaults to Z/p^precision.
        #[arg(long)]
        ring: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        p: u64,
        /// JSON list of coordinate expressions, e.g. '["1", "t"]'.
        #[arg(long)]
        coords: String,
    },
    /// kappa(E) and the units u and uu for a Breuil–Kisin spec.
    Kappa {
        #[arg(long)]
        bk: PathBuf,
        #[arg(long, default_value_t = 4)]
        len: usize,
    },
    /// The nilpotence condition for a Breuil–Kisin spec.
    Nilpotence {
        #[arg(long)]
        bk: PathBuf,
    },
    /// Invariant factors of G[p^n](A).
    BtPoints {
        #[arg(long)]
        display: PathBuf,
        #[arg(long)]
        algebra: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        n: u32,
    },
    /// Breuil window to display, with its p^n-torsion points.
    Convert {
        #[arg(long)]
        bk: PathBuf,
        /// JSON matrix of expressions for phi; defaults to [[E]].
        #[arg(long)]
        phi: Option<String>,
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long, default_value_t = 4)]
        len: usize,
    },
    /// Dual window and the duality checks.
    Dual {
        #[arg(long)]
        window: PathBuf,
    },
    /// Lift a window along a square-zero thickening.
    Lift {
        #[arg(long)]
        config: PathBuf,
    },
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let (seed, prec) = (cli.seed, cli.precision);
    match &cli.command {
        Command::Verify { suite, ring } => commands::verify(suite, ring.clone(), seed),
        Command::U0 { p, len } => commands::u0_cmd(*p, *len, prec, seed),
        Command::Ghost { ring, p, coords } => commands::ghost_cmd(ring.clone(), *p, coords, prec, seed),
        Command::Kappa { bk, len } => commands::kappa(bk.clone(), *len, prec, seed),
        Command::Nilpotence { bk } => commands::nilpotence(bk.clone(), prec, seed),
        Command::BtPoints { display, algebra, n } => {
            commands::bt_points(display.clone(), algebra.clone(), *n, prec, seed)
        }
        Command::Convert { bk, phi, n, len } => commands::convert(bk.clone(), phi.clone(), *n, *len, prec, seed),
        Command::Dual { window } => commands::dual(window.clone(), seed),
        Command::Lift { config } => commands::lift(config.clone(), seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let body = serde_json::to_string_pretty(&report).expect("report serializes");
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, format!("{body}\n")) {
                    eprintln!("config error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            println!("{body}");
            if !report.checks.is_empty() {
                eprint!("{}", report.text());
            }
            ExitCode::from(if report.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
