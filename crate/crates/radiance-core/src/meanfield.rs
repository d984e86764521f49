//! Cumulant equations of motion and their closed-form steady state for the
//! single-atom-decay channel.
//!
//! Exchange symmetry reduces the dynamics to three expectation values —
//! `z = <sigma_1^z>`, `s = <sigma_1^+ sigma_2^->` and
//! `zz = <sigma_1^z sigma_2^z>` — once the third-order term is factorized as
//! `<sigma_1^z sigma_2 sigma_3^+> ~ z s`:
//!
//! ```text
//! dz/dt  = -(gp + g1) z - 2 (N-1) g1 s + (gp - g1)
//! ds/dt  = -(gp + g1) s + (g1/2) zz + (g1/2) z + g1 (N-2) z s
//! dzz/dt = -2 (gp + g1) zz + 2 (gp - g1) z + 4 g1 s - 4 g1 (N-2) z s
//! ```
//!
//! Eliminating z and zz at the fixed point leaves a quadratic
//! `c1 s^2 + c2 s + c3 = 0` whose positive-branch root gives the stationary
//! pair correlation.

use crate::error::{Error, Result};

/// Coefficients of the stationary quadratic in the pair correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanfieldCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

/// Stationary pair correlation and inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanfieldSolution {
    /// <sigma_1^+ sigma_2^->.
    pub sig_corr: f64,
    /// <sigma_1^z>.
    pub sig_z: f64,
}

/// Time grid and the three tracked expectation values along it.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanfieldTrajectory {
    pub times: Vec<f64>,
    pub sig_z: Vec<f64>,
    pub sig_corr: Vec<f64>,
    pub sig_zz: Vec<f64>,
}

impl MeanfieldTrajectory {
    pub fn last(&self) -> (f64, f64, f64) {
        let i = self.times.len() - 1;
        (self.sig_z[i], self.sig_corr[i], self.sig_zz[i])
    }
}

fn check_rates(n_atoms: u32, gamma_p: f64, gamma_1: f64) -> Result<f64> {
    if n_atoms == 0 {
        return Err(Error::InvalidArgument("atom number must be positive".into()));
    }
    for (name, v) in [("gamma_p", gamma_p), ("gamma_1", gamma_1)] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "{name} must be a finite nonnegative rate, got {v}"
            )));
        }
    }
    let total = gamma_p + gamma_1;
    if total <= 0.0 {
        return Err(Error::InvalidArgument(
            "gamma_p + gamma_1 must be positive".into(),
        ));
    }
    Ok(total)
}

/// Coefficients of the stationary quadratic.
pub fn mf_coefficients(n_atoms: u32, gamma_p: f64, gamma_1: f64) -> Result<MeanfieldCoefficients> {
    let total = check_rates(n_atoms, gamma_p, gamma_1)?;
    let n = n_atoms as f64;
    let c1 = 4.0 * (n - 1.0) * (n - 2.0) * gamma_1 * gamma_1 / (total * total);
    let c2 = 2.0 + 2.0 * n * gamma_1 / total
        - 2.0 * gamma_1 * (2.0 * n - 3.0) * (gamma_p - gamma_1) / (total * total);
    let c3 = 2.0 * gamma_1 * (gamma_1 - gamma_p) / (total * total);
    Ok(MeanfieldCoefficients { c1, c2, c3 })
}

/// Closed-form stationary solution.
///
/// For `c1 > 0` the pair correlation is the `+sqrt` root of the quadratic;
/// at `c1 = 0` (N <= 2 or no collective decay) the quadratic degenerates to
/// its linear limit `s = -c3/c2`.
pub fn mf_steady_state(n_atoms: u32, gamma_p: f64, gamma_1: f64) -> Result<MeanfieldSolution> {
    let total = check_rates(n_atoms, gamma_p, gamma_1)?;
    let coefficients = mf_coefficients(n_atoms, gamma_p, gamma_1)?;
    let n = n_atoms as f64;
    let base_z = (gamma_p - gamma_1) / total;

    let sig_corr = stationary_pair_correlation(&coefficients)?;
    // (c2 - sqrt(disc)) / c1 rationalizes to 4 c3 / (c2 + sqrt(disc)).
    let MeanfieldCoefficients { c1, c2, c3 } = coefficients;
    let root = (c2 * c2 - 4.0 * c1 * c3).sqrt();
    let sig_z = base_z + 4.0 * gamma_1 * (n - 1.0) * c3 / ((c2 + root) * total);

    let solution = MeanfieldSolution { sig_corr, sig_z };
    if !(sig_z.is_finite() && sig_corr.is_finite())
        || sig_z.abs() > 1.0 + 1e-9
        || sig_corr.abs() > 1.0 + 1e-9
    {
        return Err(Error::NumericalFailure(format!(
            "stationary root out of physical range: sig_z = {sig_z}, sig_corr = {sig_corr} \
             at N = {n_atoms}, gamma_p = {gamma_p}, gamma_1 = {gamma_1}"
        )));
    }
    Ok(solution)
}

/// The `+sqrt` root of `c1 s^2 + c2 s + c3 = 0`, evaluated in the
/// rationalized form `-2 c3 / (c2 + sqrt(c2^2 - 4 c1 c3))`. The two forms
/// are algebraically identical; this one stays accurate as `c1 -> 0` and
/// reduces to the degenerate-branch value `-c3 / c2` at `c1 = 0`.
pub fn stationary_pair_correlation(c: &MeanfieldCoefficients) -> Result<f64> {
    let discriminant = c.c2 * c.c2 - 4.0 * c.c1 * c.c3;
    if discriminant < 0.0 {
        return Err(Error::NumericalFailure(format!(
            "negative discriminant {discriminant:e} in the stationary quadratic"
        )));
    }
    let denominator = c.c2 + discriminant.sqrt();
    if denominator <= 0.0 {
        return Err(Error::NumericalFailure(
            "stationary quadratic is degenerate with a nonpositive linear term".into(),
        ));
    }
    Ok(-2.0 * c.c3 / denominator)
}

/// Radiance observables implied by a stationary cumulant solution:
/// `(<J_+ J_->, total population, atom-atom correlation)`.
pub fn mf_observables(sol: &MeanfieldSolution, n_atoms: u32) -> (f64, f64, f64) {
    let n = n_atoms as f64;
    let sum_pop = n * (sol.sig_z + 1.0) / 2.0;
    let jpjm = sum_pop + n * (n - 1.0) * sol.sig_corr;
    let r_f = (n - 1.0) * sol.sig_corr;
    (jpjm, sum_pop, r_f)
}

/// Right-hand sides of the closed three-variable system.
fn rhs(n: f64, gamma_p: f64, gamma_1: f64, y: [f64; 3]) -> [f64; 3] {
    let [z, s, zz] = y;
    let total = gamma_p + gamma_1;
    let third = z * s; // factorized <sigma_1^z sigma_2 sigma_3^+>
    [
        -total * z - 2.0 * (n - 1.0) * gamma_1 * s + (gamma_p - gamma_1),
        -total * s + 0.5 * gamma_1 * zz + 0.5 * gamma_1 * z + gamma_1 * (n - 2.0) * third,
        -2.0 * total * zz + 2.0 * (gamma_p - gamma_1) * z + 4.0 * gamma_1 * s
            - 4.0 * gamma_1 * (n - 2.0) * third,
    ]
}

/// Residuals of the fixed-point equations at a candidate solution, with
/// `zz` eliminated through its own stationarity condition.
pub fn mf_fixed_point_residuals(
    n_atoms: u32,
    gamma_p: f64,
    gamma_1: f64,
    sol: &MeanfieldSolution,
) -> [f64; 3] {
    let n = n_atoms as f64;
    let total = gamma_p + gamma_1;
    let z = sol.sig_z;
    let s = sol.sig_corr;
    // stationary zz from the third equation
    let zz = (2.0 * (gamma_p - gamma_1) * z + 4.0 * gamma_1 * s
        - 4.0 * gamma_1 * (n - 2.0) * z * s)
        / (2.0 * total);
    rhs(n, gamma_p, gamma_1, [z, s, zz])
}

fn rk4_step(n: f64, gamma_p: f64, gamma_1: f64, y: [f64; 3], h: f64) -> [f64; 3] {
    let add = |a: [f64; 3], b: [f64; 3], f: f64| {
        [a[0] + f * b[0], a[1] + f * b[1], a[2] + f * b[2]]
    };
    let k1 = rhs(n, gamma_p, gamma_1, y);
    let k2 = rhs(n, gamma_p, gamma_1, add(y, k1, h / 2.0));
    let k3 = rhs(n, gamma_p, gamma_1, add(y, k2, h / 2.0));
    let k4 = rhs(n, gamma_p, gamma_1, add(y, k3, h));
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        y[2] + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    ]
}

fn integrate(
    n: f64,
    gamma_p: f64,
    gamma_1: f64,
    initial: [f64; 3],
    t_final: f64,
    steps: usize,
) -> (Vec<f64>, Vec<[f64; 3]>) {
    let h = t_final / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    let mut y = initial;
    times.push(0.0);
    values.push(y);
    for i in 1..=steps {
        y = rk4_step(n, gamma_p, gamma_1, y, h);
        times.push(i as f64 * h);
        values.push(y);
    }
    (times, values)
}

/// Integrate the closed system from `initial = (sig_z, sig_corr, sig_zz)`.
///
/// Fixed-step fourth-order integration with step at most
/// `0.01 / (gamma_p + gamma_1)`, cross-checked against a half-step run.
pub fn mf_evolve(
    n_atoms: u32,
    gamma_p: f64,
    gamma_1: f64,
    initial: (f64, f64, f64),
    t_final: f64,
) -> Result<MeanfieldTrajectory> {
    let total = check_rates(n_atoms, gamma_p, gamma_1)?;
    let init = [initial.0, initial.1, initial.2];
    if init.iter().any(|v| !v.is_finite() || v.abs() > 1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "initial expectation values must have magnitude <= 1, got {init:?}"
        )));
    }
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "t_final must be finite and nonnegative, got {t_final}"
        )));
    }
    let n = n_atoms as f64;
    if t_final == 0.0 {
        return Ok(MeanfieldTrajectory {
            times: vec![0.0],
            sig_z: vec![init[0]],
            sig_corr: vec![init[1]],
            sig_zz: vec![init[2]],
        });
    }

    let steps = (t_final * total / 0.01).ceil().max(1.0) as usize;
    let (times, values) = integrate(n, gamma_p, gamma_1, init, t_final, steps);
    let (_, refined) = integrate(n, gamma_p, gamma_1, init, t_final, 2 * steps);

    let coarse = values.last().unwrap();
    let fine = refined.last().unwrap();
    let drift = coarse
        .iter()
        .zip(fine)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if drift > 1e-8 {
        return Err(Error::NumericalFailure(format!(
            "step-halving check failed: endpoint drift {drift:e}"
        )));
    }

    for y in &values {
        if y.iter().any(|v| !v.is_finite() || v.abs() > 1.0 + 1e-9) {
            return Err(Error::NumericalFailure(format!(
                "trajectory left the physical range: {y:?}"
            )));
        }
    }

    Ok(MeanfieldTrajectory {
        times,
        sig_z: values.iter().map(|y| y[0]).collect(),
        sig_corr: values.iter().map(|y| y[1]).collect(),
        sig_zz: values.iter().map(|y| y[2]).collect(),
    })
}
