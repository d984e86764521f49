//! Command-line runner for the collective-radiance solver.
//!
//! Exit codes: 0 success, 2 configuration/parse error, 3 numerical failure,
//! 4 verification failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use radiance_cli::config::{merge, parse_config_text, resolve, Mode, PartialConfig, SweepVariable};
use radiance_cli::{run, verify};
use radiance_core::Error as CoreError;

#[derive(Parser)]
#[command(
    name = "radiance",
    about = "Steady-state collective radiance of pumped atomic ensembles \
             with single- and two-atom collective decay",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one steady state and print a CSV row.
    Steady(CommonArgs),
    /// Sweep one rate over a log grid and emit a CSV table.
    Sweep(CommonArgs),
    /// Emit the steady-state (J, M, probability) ladder map.
    Ladder(CommonArgs),
    /// Run the oracle-equivalence and adiabatic-elimination suites.
    Verify(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Config file with `key = value` lines; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long)]
    n_atoms: Option<u32>,

    /// Pump rate, in units of epsilon.
    #[arg(long)]
    gamma_p: Option<f64>,

    /// Single-atom collective decay rate, in units of epsilon.
    #[arg(long)]
    gamma_1: Option<f64>,

    /// Two-atom collective decay rate, in units of epsilon.
    #[arg(long)]
    gamma_2: Option<f64>,

    /// Output path for the CSV/ladder file.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Number of sweep grid points.
    #[arg(long)]
    points: Option<usize>,

    /// Sweep range as LO:HI (log-spaced).
    #[arg(long, value_name = "LO:HI")]
    range: Option<String>,

    /// Variable swept over the grid.
    #[arg(long, value_name = "gamma_p|gamma_1|gamma_2")]
    sweep_variable: Option<String>,

    /// Worker threads for sweep evaluation (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn flags_to_partial(args: &CommonArgs, mode: Mode) -> Result<PartialConfig, String> {
    let mut partial = PartialConfig {
        mode: Some(mode),
        n_atoms: args.n_atoms,
        gamma_p: args.gamma_p,
        gamma_1: args.gamma_1,
        gamma_2: args.gamma_2,
        out: args.out.clone(),
        sweep_points: args.points,
        ..PartialConfig::default()
    };
    if let Some(range) = &args.range {
        let (lo, hi) = range
            .split_once(':')
            .ok_or_else(|| format!("--range expects LO:HI, got `{range}`"))?;
        let lo: f64 = lo
            .trim()
            .parse()
            .map_err(|_| format!("malformed range endpoint `{lo}`"))?;
        let hi: f64 = hi
            .trim()
            .parse()
            .map_err(|_| format!("malformed range endpoint `{hi}`"))?;
        partial.sweep_start = Some(lo);
        partial.sweep_stop = Some(hi);
    }
    if let Some(variable) = &args.sweep_variable {
        partial.sweep_variable = Some(match variable.as_str() {
            "gamma_p" => SweepVariable::GammaP,
            "gamma_1" => SweepVariable::Gamma1,
            "gamma_2" => SweepVariable::Gamma2,
            other => return Err(format!("unknown sweep variable `{other}`")),
        });
    }
    Ok(partial)
}

fn core_exit(err: &CoreError) -> ExitCode {
    match err {
        CoreError::InvalidArgument(_) => ExitCode::from(2),
        _ => ExitCode::from(3),
    }
}

fn execute(args: &CommonArgs, mode: Mode) -> ExitCode {
    let flags = match flags_to_partial(args, mode) {
        Ok(f) => f,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(2);
        }
    };

    let from_file = if let Some(path) = &args.config {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(2);
            }
        };
        match parse_config_text(&text) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    } else {
        PartialConfig::default()
    };

    if mode == Mode::Verify {
        // Verify needs no model parameters; only a mode conflict matters.
        if let Some(file_mode) = from_file.mode {
            if file_mode != Mode::Verify {
                eprintln!(
                    "error: config requests mode `{}` but the verify command was given",
                    file_mode.name()
                );
                return ExitCode::from(2);
            }
        }
        return if verify::run_verification() {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(4)
        };
    }

    let merged = match merge(from_file, flags) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let resolved = match resolve(merged) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    let outcome = match args.threads {
        Some(threads) if resolved.mode == Mode::Sweep => {
            match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
                Ok(pool) => pool.install(|| run::run(&resolved)),
                Err(e) => {
                    eprintln!("error: cannot build thread pool: {e}");
                    return ExitCode::from(2);
                }
            }
        }
        _ => run::run(&resolved),
    };

    match outcome {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            core_exit(&e)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Steady(args) => execute(args, Mode::Steady),
        Command::Sweep(args) => execute(args, Mode::Sweep),
        Command::Ladder(args) => execute(args, Mode::Ladder),
        Command::Verify(args) => execute(args, Mode::Verify),
    }
}
