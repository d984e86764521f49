//! The `verify` mode: oracle-equivalence and adiabatic-elimination suites.
//!
//! Every check compares the reduced ladder solver against the brute-force
//! product-space route and prints one pass/fail line.

use radiance_core::oracle::{
    cavity_cutoff_report, full_atomic_liouvillian, full_cavity_liouvillian, full_observables,
    full_steady_state, project_to_dicke,
};
use radiance_core::{
    evolve, steady_state, DickeBasis, DiagonalState, ModelParams, ObservableSet, RateGenerator,
};

pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> CheckOutcome {
    CheckOutcome {
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

/// The fixed verification grid: pump-to-decay ratios, decay-channel splits
/// and two overall rate scales.
pub fn rate_grid() -> Vec<(f64, f64, f64)> {
    let mut grid = Vec::new();
    for ratio in [0.1, 1.0, 10.0] {
        for (g1, g2) in [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
            for scale in [1.0, 5.0] {
                grid.push((ratio * scale, g1 * scale, g2 * scale));
            }
        }
    }
    grid
}

fn basis_checks() -> CheckOutcome {
    for n in 1..=100u32 {
        let basis = match DickeBasis::new(n) {
            Ok(b) => b,
            Err(e) => return check("basis-sum-rule", false, e.to_string()),
        };
        let sum: u128 = basis
            .sectors()
            .iter()
            .map(|s| s.degeneracy * (s.two_j as u128 + 1))
            .sum();
        if sum != 1u128 << n {
            return check("basis-sum-rule", false, format!("sum rule broken at N = {n}"));
        }
    }
    check("basis-sum-rule", true, "N = 1..100 exact")
}

fn generator_checks() -> CheckOutcome {
    for n in [2u32, 5, 17, 100] {
        for &(gp, g1, g2) in &rate_grid()[..6] {
            let basis = DickeBasis::new(n).unwrap();
            let params = ModelParams::new(n, gp, g1, g2).unwrap();
            let gen = RateGenerator::build(&basis, &params).unwrap();
            let scale = gen.max_outflow().max(1.0);
            let worst = gen
                .column_sums()
                .into_iter()
                .fold(0.0f64, |a, s| a.max(s.abs()));
            if worst > 1e-12 * scale {
                return check(
                    "generator-columns",
                    false,
                    format!("column sum {worst:e} at N = {n}"),
                );
            }
        }
    }
    check("generator-columns", true, "column sums zero on the grid")
}

fn oracle_equivalence_checks() -> Vec<CheckOutcome> {
    let mut outcomes = Vec::new();
    for n in 2..=6u32 {
        let basis = DickeBasis::new(n).unwrap();
        let mut worst_population = 0.0f64;
        let mut worst_coherence = 0.0f64;
        let mut worst_observable = 0.0f64;
        let mut failure: Option<String> = None;
        for &(gp, g1, g2) in &rate_grid() {
            let result = (|| -> Result<(), String> {
                let params = ModelParams::new(n, gp, g1, g2).map_err(|e| e.to_string())?;
                let gen = RateGenerator::build(&basis, &params).map_err(|e| e.to_string())?;
                let reduced = steady_state(&gen).map_err(|e| e.to_string())?;
                let liouvillian =
                    full_atomic_liouvillian(n, gp, g1, g2).map_err(|e| e.to_string())?;
                let full = full_steady_state(&liouvillian).map_err(|e| e.to_string())?;
                let (projected, coherence) =
                    project_to_dicke(&full, &basis).map_err(|e| e.to_string())?;
                worst_population = worst_population.max(reduced.state.max_abs_diff(&projected));
                worst_coherence = worst_coherence.max(coherence);

                let ladder = ObservableSet::compute(&reduced.state);
                let exact = full_observables(&full).map_err(|e| e.to_string())?;
                for (a, b) in [
                    (ladder.jpjm, exact.jpjm),
                    (ladder.jp2jm2, exact.jp2jm2),
                    (ladder.jp4jm4, exact.jp4jm4),
                    (ladder.jz, exact.jz),
                    (ladder.jz2, exact.jz2),
                    (ladder.jsq, exact.jsq),
                    (ladder.sum_pop, exact.sum_pop),
                    (ladder.r_f, exact.r_f),
                    (ladder.sigma_z, exact.sigma_z),
                    (ladder.xi2, exact.xi2),
                    (
                        ladder.g2_1.unwrap_or(-1.0),
                        exact.g2_1.unwrap_or(-1.0),
                    ),
                    (
                        ladder.g2_2.unwrap_or(-1.0),
                        exact.g2_2.unwrap_or(-1.0),
                    ),
                ] {
                    worst_observable = worst_observable.max((a - b).abs());
                }
                Ok(())
            })();
            if let Err(e) = result {
                failure = Some(e);
                break;
            }
        }
        let name = format!("oracle-equivalence N={n}");
        match failure {
            Some(e) => outcomes.push(check(name, false, e)),
            None => {
                let passed =
                    worst_population <= 1e-8 && worst_coherence <= 1e-8 && worst_observable <= 1e-8;
                outcomes.push(check(
                    name,
                    passed,
                    format!(
                        "max population dev {worst_population:.2e}, coherence {worst_coherence:.2e}, \
                         observable dev {worst_observable:.2e}"
                    ),
                ));
            }
        }
    }
    outcomes
}

fn adiabatic_checks() -> Vec<CheckOutcome> {
    let mut outcomes = Vec::new();
    for lambda_over_kappa in [0.02, 0.05] {
        let kappa = 1.0;
        let lambda = lambda_over_kappa * kappa;
        let gamma_2 = 4.0 * lambda * lambda / kappa;
        let gamma_p = 0.5 * gamma_2;
        let name = format!("adiabatic-elimination lambda/kappa={lambda_over_kappa}");
        let result = (|| -> Result<(f64, f64), String> {
            let cavity =
                full_cavity_liouvillian(2, 5, lambda, kappa, gamma_p).map_err(|e| e.to_string())?;
            let joint = full_steady_state(&cavity).map_err(|e| e.to_string())?;
            let report = cavity_cutoff_report(&joint).map_err(|e| e.to_string())?;
            if !report.adequate {
                return Err(format!(
                    "Fock cutoff too small: top population {:.2e}",
                    report.top_population
                ));
            }
            let atoms = joint.trace_out_cavity().map_err(|e| e.to_string())?;
            let via_cavity = full_observables(&atoms).map_err(|e| e.to_string())?;
            let atomic =
                full_atomic_liouvillian(2, gamma_p, 0.0, gamma_2).map_err(|e| e.to_string())?;
            let via_reduced = full_observables(&full_steady_state(&atomic).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let mut worst = 0.0f64;
            for (a, b) in [
                (via_cavity.jpjm, via_reduced.jpjm),
                (via_cavity.jp2jm2, via_reduced.jp2jm2),
                (via_cavity.jp4jm4, via_reduced.jp4jm4),
                (via_cavity.jz, via_reduced.jz),
                (via_cavity.jz2, via_reduced.jz2),
                (via_cavity.jsq, via_reduced.jsq),
                (via_cavity.sum_pop, via_reduced.sum_pop),
                (via_cavity.r_f, via_reduced.r_f),
                (via_cavity.sigma_z, via_reduced.sigma_z),
                (via_cavity.xi2, via_reduced.xi2),
                (
                    via_cavity.g2_1.unwrap_or(0.0),
                    via_reduced.g2_1.unwrap_or(0.0),
                ),
                (
                    via_cavity.g2_2.unwrap_or(0.0),
                    via_reduced.g2_2.unwrap_or(0.0),
                ),
            ] {
                let rel = (a - b).abs() / a.abs().max(b.abs()).max(1e-12);
                worst = worst.max(rel);
            }
            Ok((worst, report.top_population))
        })();
        match result {
            Ok((worst, top)) => outcomes.push(check(
                name,
                worst <= 0.05,
                format!("max observable deviation {:.2}%, top Fock population {top:.1e}", 100.0 * worst),
            )),
            Err(e) => outcomes.push(check(name, false, e)),
        }
    }
    outcomes
}

fn convergence_check() -> CheckOutcome {
    let basis = DickeBasis::new(4).unwrap();
    let params = ModelParams::new(4, 1.0, 0.0, 1.0).unwrap();
    let gen = RateGenerator::build(&basis, &params).unwrap();
    let stationary = match steady_state(&gen) {
        Ok(s) => s.state,
        Err(e) => return check("evolve-convergence", false, e.to_string()),
    };
    let initial = DiagonalState::all_ground(basis);
    match evolve(&gen, &initial, 50.0, 0.5) {
        Ok(evolved) => {
            let dev = evolved.max_abs_diff(&stationary);
            check(
                "evolve-convergence",
                dev <= 1e-6,
                format!("max deviation {dev:.2e} after 50 decay times"),
            )
        }
        Err(e) => check("evolve-convergence", false, e.to_string()),
    }
}

/// Run every check, print one line each, and report overall success.
pub fn run_verification() -> bool {
    let mut outcomes = vec![basis_checks(), generator_checks()];
    outcomes.extend(oracle_equivalence_checks());
    outcomes.extend(adiabatic_checks());
    outcomes.push(convergence_check());

    let mut all_passed = true;
    for outcome in &outcomes {
        println!(
            "{:48} {}  ({})",
            outcome.name,
            if outcome.passed { "pass" } else { "FAIL" },
            outcome.detail
        );
        all_passed &= outcome.passed;
    }
    all_passed
}
