//! Execution of the steady, sweep and ladder modes and CSV emission.

use std::fs;
use std::io::Write;

use radiance_core::observables::ladder_distribution;
use radiance_core::{
    steady_state, DickeBasis, Error as CoreError, ModelParams, ObservableSet, RateGenerator,
};
use rayon::prelude::*;

use crate::config::{Mode, RunConfig, SweepVariable};

/// One emitted result row. Rates are reported as multiples of epsilon;
/// `g2_1`/`g2_2` stay empty when the correlation is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub gamma_p_over_eps: f64,
    pub gamma_1_over_eps: f64,
    pub gamma_2_over_eps: f64,
    pub jpjm: f64,
    pub sum_pop: f64,
    pub r_f: f64,
    pub sigma_z: f64,
    pub xi2: f64,
    pub g2_1: Option<f64>,
    pub g2_2: Option<f64>,
    pub solver_residual: f64,
}

pub const CSV_HEADER: &str = "gamma_p_over_eps,gamma_1_over_eps,gamma_2_over_eps,jpjm,sum_pop,\
                              r_f,sigma_z,xi2,g2_1,g2_2,solver_residual";

/// 17 significant digits: round-trips f64 exactly.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

impl CsvRow {
    pub fn to_line(&self) -> String {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        [
            fmt_f64(self.gamma_p_over_eps),
            fmt_f64(self.gamma_1_over_eps),
            fmt_f64(self.gamma_2_over_eps),
            fmt_f64(self.jpjm),
            fmt_f64(self.sum_pop),
            fmt_f64(self.r_f),
            fmt_f64(self.sigma_z),
            fmt_f64(self.xi2),
            opt(self.g2_1),
            opt(self.g2_2),
            fmt_f64(self.solver_residual),
        ]
        .join(",")
    }

    /// Re-validate the physical range of an emitted row.
    fn check(&self) -> Result<(), CoreError> {
        let ok = self.sigma_z.abs() <= 1.0 + 1e-9
            && self.xi2 >= -1e-12
            && self.g2_1.is_none_or(|v| v >= 0.0)
            && self.g2_2.is_none_or(|v| v >= 0.0)
            && self.solver_residual <= 1e-10;
        if ok {
            Ok(())
        } else {
            Err(CoreError::NumericalFailure(format!(
                "row failed re-validation: {self:?}"
            )))
        }
    }
}

fn solve_row(
    basis: &DickeBasis,
    n_atoms: u32,
    gamma_p: f64,
    gamma_1: f64,
    gamma_2: f64,
) -> Result<CsvRow, CoreError> {
    let params = ModelParams::new(n_atoms, gamma_p, gamma_1, gamma_2)?;
    let gen = RateGenerator::build(basis, &params)?;
    let solved = steady_state(&gen)?;
    let obs = ObservableSet::compute(&solved.state);
    let row = CsvRow {
        gamma_p_over_eps: gamma_p,
        gamma_1_over_eps: gamma_1,
        gamma_2_over_eps: gamma_2,
        jpjm: obs.jpjm,
        sum_pop: obs.sum_pop,
        r_f: obs.r_f,
        sigma_z: obs.sigma_z,
        xi2: obs.xi2,
        g2_1: obs.g2_1,
        g2_2: obs.g2_2,
        solver_residual: solved.residual,
    };
    row.check()?;
    Ok(row)
}

fn write_output(path: &std::path::Path, contents: &str) -> Result<(), CoreError> {
    fs::write(path, contents)
        .map_err(|e| CoreError::InvalidArgument(format!("cannot write {}: {e}", path.display())))
}

/// Run a resolved non-verify configuration. Returns the text also written to
/// `config.out` (when set); steady mode additionally prints to stdout.
pub fn run(config: &RunConfig) -> Result<String, CoreError> {
    let basis = DickeBasis::new(config.n_atoms)?;
    let output = match config.mode {
        Mode::Steady => {
            let row = solve_row(
                &basis,
                config.n_atoms,
                config.gamma_p,
                config.gamma_1,
                config.gamma_2,
            )?;
            let text = format!("{CSV_HEADER}\n{}\n", row.to_line());
            print!("{text}");
            std::io::stdout().flush().ok();
            text
        }
        Mode::Sweep => {
            let grid = config.sweep.grid();
            let rows: Vec<Result<CsvRow, CoreError>> = grid
                .par_iter()
                .map(|&value| {
                    let (gp, g1, g2) = match config.sweep.variable {
                        SweepVariable::GammaP => (value, config.gamma_1, config.gamma_2),
                        SweepVariable::Gamma1 => (config.gamma_p, value, config.gamma_2),
                        SweepVariable::Gamma2 => (config.gamma_p, config.gamma_1, value),
                    };
                    solve_row(&basis, config.n_atoms, gp, g1, g2)
                })
                .collect();
            let mut text = String::from(CSV_HEADER);
            text.push('\n');
            for row in rows {
                text.push_str(&row?.to_line());
                text.push('\n');
            }
            if config.out.is_none() {
                print!("{text}");
                std::io::stdout().flush().ok();
            }
            text
        }
        Mode::Ladder => {
            let params = ModelParams::new(
                config.n_atoms,
                config.gamma_p,
                config.gamma_1,
                config.gamma_2,
            )?;
            let gen = RateGenerator::build(&basis, &params)?;
            let solved = steady_state(&gen)?;
            let mut text = String::from("J,M,probability\n");
            for entry in ladder_distribution(&solved.state).entries() {
                text.push_str(&format!(
                    "{},{},{}\n",
                    entry.j(),
                    entry.m(),
                    fmt_f64(entry.probability)
                ));
            }
            if config.out.is_none() {
                print!("{text}");
                std::io::stdout().flush().ok();
            }
            text
        }
        Mode::Verify => unreachable!("verify handled separately"),
    };

    if let Some(path) = &config.out {
        write_output(path, &output)?;
    }
    Ok(output)
}
