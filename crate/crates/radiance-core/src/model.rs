//! Model parameters and the circuit-to-collective rate conversion.

use crate::error::{Error, Result};

/// Rates of the reduced collective-radiance model: incoherent per-atom
/// pumping `gamma_p`, single-atom collective decay `gamma_1` and two-atom
/// collective decay `gamma_2`. All rates are carried as multiples of the
/// reference rate `epsilon`; only ratios enter steady-state observables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub n_atoms: u32,
    pub gamma_p: f64,
    pub gamma_1: f64,
    pub gamma_2: f64,
    /// Reference rate unit (ordinary frequency, Hz); reporting only.
    pub epsilon: f64,
}

/// Reference rate of the studied regime, `epsilon / 2 pi = 10 Hz`.
pub const DEFAULT_EPSILON_HZ: f64 = 10.0;

impl ModelParams {
    pub fn new(n_atoms: u32, gamma_p: f64, gamma_1: f64, gamma_2: f64) -> Result<Self> {
        Self::with_epsilon(n_atoms, gamma_p, gamma_1, gamma_2, DEFAULT_EPSILON_HZ)
    }

    pub fn with_epsilon(
        n_atoms: u32,
        gamma_p: f64,
        gamma_1: f64,
        gamma_2: f64,
        epsilon: f64,
    ) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::InvalidArgument("atom number must be positive".into()));
        }
        for (name, value) in [("gamma_p", gamma_p), ("gamma_1", gamma_1), ("gamma_2", gamma_2)] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be a finite nonnegative rate, got {value}"
                )));
            }
        }
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be a positive rate, got {epsilon}"
            )));
        }
        Ok(Self {
            n_atoms,
            gamma_p,
            gamma_1,
            gamma_2,
            epsilon,
        })
    }
}

/// Parameters of the parametrically coupled two-resonator circuit that
/// realizes the two-atom decay channel. Any consistent frequency unit works;
/// the conversion formulas are homogeneous of degree one in rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitParams {
    /// Parametric coupling between the two resonators.
    pub lambda_ab: f64,
    /// Collective spin-resonator coupling, sqrt(N) times the single-spin one.
    pub lambda_b_gamma: f64,
    /// Detuning between resonator b and the two-level transition.
    pub delta: f64,
    /// Decay rate of resonator a.
    pub kappa_a: f64,
    /// Decay rate of resonator b; recorded, does not enter the conversion.
    pub kappa_b: f64,
    pub n_atoms: u32,
}

impl CircuitParams {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("lambda_ab", self.lambda_ab),
            ("lambda_b_gamma", self.lambda_b_gamma),
            ("delta", self.delta),
            ("kappa_a", self.kappa_a),
            ("kappa_b", self.kappa_b),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "circuit parameter {name} must be a positive rate, got {value}"
                )));
            }
        }
        if self.n_atoms == 0 {
            return Err(Error::InvalidArgument("atom number must be positive".into()));
        }
        Ok(())
    }
}

/// Effective rates obtained by adiabatic elimination of the circuit modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveRates {
    /// Effective two-excitation atom-cavity coupling.
    pub lambda: f64,
    /// Two-atom collective decay rate, `4 lambda^2 / kappa_a`.
    pub gamma_2: f64,
    /// Set when `kappa_a < 100 lambda`, i.e. the bad-cavity assumption behind
    /// the elimination is strained.
    pub bad_cavity_strained: bool,
}

/// Convert circuit parameters to the effective coupling
/// `lambda = lambda_ab * lambda_b_gamma^2 / (N * delta^2)` and the two-atom
/// collective decay rate `gamma_2 = 4 lambda^2 / kappa_a`.
pub fn effective_rates(cp: &CircuitParams) -> Result<EffectiveRates> {
    cp.validate()?;
    let lambda = cp.lambda_ab * cp.lambda_b_gamma * cp.lambda_b_gamma
        / (cp.n_atoms as f64 * cp.delta * cp.delta);
    let gamma_2 = 4.0 * lambda * lambda / cp.kappa_a;
    Ok(EffectiveRates {
        lambda,
        gamma_2,
        bad_cavity_strained: cp.kappa_a < 100.0 * lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference_circuit() -> CircuitParams {
        CircuitParams {
            lambda_ab: 20e6,
            lambda_b_gamma: 20e6,
            delta: 200e6,
            kappa_a: 1.6e6,
            kappa_b: 10e3,
            n_atoms: 100,
        }
    }

    #[test]
    fn reference_circuit_gives_2khz_coupling_and_10hz_decay() {
        let rates = effective_rates(&reference_circuit()).unwrap();
        assert_relative_eq!(rates.lambda, 2e3, max_relative = 1e-12);
        assert_relative_eq!(rates.gamma_2, 10.0, max_relative = 1e-12);
        assert!(!rates.bad_cavity_strained);
    }

    #[test]
    fn conversion_is_homogeneous_in_the_parametric_coupling() {
        let base = effective_rates(&reference_circuit()).unwrap();
        let mut doubled = reference_circuit();
        doubled.lambda_ab *= 2.0;
        let scaled = effective_rates(&doubled).unwrap();
        assert_relative_eq!(scaled.lambda, 2.0 * base.lambda, max_relative = 1e-12);
        assert_relative_eq!(scaled.gamma_2, 4.0 * base.gamma_2, max_relative = 1e-12);
    }

    #[test]
    fn strained_cavity_is_flagged() {
        let mut cp = reference_circuit();
        cp.kappa_a = 50.0 * 2e3; // below the 100 lambda margin
        let rates = effective_rates(&cp).unwrap();
        assert!(rates.bad_cavity_strained);
    }

    #[test]
    fn nonpositive_inputs_are_rejected() {
        let mut cp = reference_circuit();
        cp.delta = 0.0;
        assert!(matches!(effective_rates(&cp), Err(Error::InvalidArgument(_))));
        let mut cp = reference_circuit();
        cp.kappa_a = -1.0;
        assert!(effective_rates(&cp).is_err());
    }

    #[test]
    fn model_params_reject_negative_rates() {
        assert!(ModelParams::new(10, -1.0, 0.0, 1.0).is_err());
        assert!(ModelParams::new(0, 1.0, 0.0, 1.0).is_err());
        assert!(ModelParams::new(10, 1.0, 0.0, 1.0).is_ok());
    }
}
