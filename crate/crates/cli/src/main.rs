//! `ctc-sim`: run the worked examples, solve circuits with CTC qubits, and
//! drive the SAT protocol and its noise analysis. Output is tab-separated.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on
//! errors and usage mistakes.

mod evolve;
mod examples;
mod input;
mod noise;
mod sat;
mod table;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use ctc_core::noise::DEFAULT_BOUND_SAMPLES;
use ctc_core::sat::SatMode;
use ctc_core::{Policy, Tolerances};

use table::Report;

#[derive(Parser, Debug)]
#[command(name = "ctc-sim", version, about = "Simulate quantum circuits with closed-timelike-curve qubits")]
struct Cli {
    /// Seed for every random choice
    #[arg(long, global = true, env = "CTC_SIM_SEED", default_value_t = 0)]
    seed: u64,

    /// Write the table here instead of standard output
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Singular-value cutoff for fixed-point directions and residual bound
    #[arg(long, global = true, value_name = "TOL", value_parser = positive)]
    tol_fixed_point: Option<f64>,

    /// Eigenvalue slack for positivity checks
    #[arg(long, global = true, value_name = "TOL", value_parser = positive)]
    tol_psd: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the three built-in circuits over fixed inputs and check the closed forms
    Examples,
    /// Solve a circuit for its CTC state and output
    Evolve(EvolveArgs),
    /// Like evolve, also printing the whole fixed-point set
    Fixedpoint(EvolveArgs),
    /// Decide satisfiability of a DIMACS formula with the CTC protocol
    Sat(SatCmd),
    /// Evaluate the effect of state-preparation noise
    Noise(NoiseCmd),
}

#[derive(Args, Debug)]
struct EvolveArgs {
    /// Circuit file
    #[arg(long, value_name = "FILE", conflicts_with = "builtin", required_unless_present = "builtin")]
    circuit: Option<PathBuf>,

    /// Built-in circuit: CPHASE_SWAP, CROT or S_GATE
    #[arg(long, value_name = "NAME")]
    builtin: Option<String>,

    /// Input state: 'bloch NX NY NZ', 'basis BITS' or 'file PATH'
    #[arg(long, required = true, num_args = 1..=4, allow_negative_numbers = true, value_name = "SPEC")]
    rho_in: Vec<String>,

    /// Fixed-point selection rule
    #[arg(long, value_enum, default_value_t = PolicyName::MaxEntropy)]
    policy: PolicyName,

    /// Coordinates for the EXPLICIT policy, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, value_name = "X,..")]
    coords: Vec<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
#[value(rename_all = "SCREAMING_SNAKE_CASE")]
enum PolicyName {
    MaxEntropy,
    Cesaro,
    Explicit,
}

#[derive(Args, Debug)]
struct SatCmd {
    /// DIMACS CNF file
    #[arg(long, value_name = "FILE")]
    cnf: PathBuf,

    /// Applications of S per run (default: number of variables)
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    p: Option<u32>,

    /// Independent runs (default: number of variables)
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    q: Option<u32>,

    #[arg(long, value_enum, default_value_t = ModeName::Mc)]
    mode: ModeName,

    /// Monte Carlo repetitions for the failure-rate estimate (0 = single run)
    #[arg(long, default_value_t = 0)]
    trials: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModeName {
    Mc,
    Exact,
}

#[derive(Args, Debug)]
struct NoiseCmd {
    /// Perturbation of the prepared ancilla
    #[arg(long)]
    mu: Option<f64>,

    /// Number of variables
    #[arg(long)]
    n: Option<usize>,

    /// Applications of S (default: n)
    #[arg(long)]
    p: Option<u32>,

    /// Threshold constants `b,c` for bound_check
    #[arg(long, value_name = "B,C", value_parser = parse_pair)]
    bound: Option<(f64, f64)>,

    /// μ samples for bound_check
    #[arg(long, default_value_t = DEFAULT_BOUND_SAMPLES)]
    samples: usize,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("'{s}' is not a positive number")),
    }
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected 'b,c', got '{s}'"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number"));
    Ok((parse(a)?, parse(b)?))
}

fn tolerances(cli: &Cli) -> Tolerances {
    let mut tol = Tolerances::default();
    if let Some(v) = cli.tol_fixed_point {
        tol.fixed_point = v;
    }
    if let Some(v) = cli.tol_psd {
        tol.psd = v;
    }
    tol
}

fn policy(args: &EvolveArgs) -> Policy {
    let usage = |msg: &str| Cli::command().error(ErrorKind::ArgumentConflict, msg).exit();
    match args.policy {
        PolicyName::Explicit if args.coords.is_empty() => usage("policy EXPLICIT needs coordinates: pass --coords X[,Y..]"),
        PolicyName::Explicit => Policy::Explicit(args.coords.clone()),
        _ if !args.coords.is_empty() => usage("--coords is only meaningful with --policy EXPLICIT"),
        PolicyName::MaxEntropy => Policy::MaxEntropy,
        PolicyName::Cesaro => Policy::Cesaro,
    }
}

fn run(cli: &Cli) -> Result<Report> {
    let tol = tolerances(cli);
    match &cli.command {
        Command::Examples => examples::run(&tol),
        Command::Evolve(a) | Command::Fixedpoint(a) => {
            let policy = policy(a);
            let circuit = input::load_circuit(a.circuit.as_deref(), a.builtin.as_deref())?;
            let rho_in = input::parse_rho_in(&a.rho_in)?;
            evolve::run(&circuit, &rho_in, &policy, &tol, matches!(cli.command, Command::Fixedpoint(_)))
        }
        Command::Sat(a) => {
            let text = input::read_text(&a.cnf)?;
            let mode = match a.mode {
                ModeName::Mc => SatMode::MonteCarlo,
                ModeName::Exact => SatMode::Exact,
            };
            let args = sat::SatArgs { p: a.p, q: a.q, seed: cli.seed, mode, trials: a.trials };
            sat::run(&text, &args).with_context(|| format!("in {}", a.cnf.display()))
        }
        Command::Noise(a) => noise::run(&noise::NoiseArgs {
            mu: a.mu,
            n: a.n,
            p: a.p,
            bound: a.bound,
            samples: a.samples,
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let text = report.render();
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if report.checks_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
