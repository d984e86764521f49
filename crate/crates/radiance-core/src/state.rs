//! Probability distributions over the (J, M) ladder space.

use crate::basis::DickeBasis;
use crate::error::{Error, Result};

/// Slack below zero tolerated for probabilities produced by the solvers.
pub const POSITIVITY_TOL: f64 = 1e-12;
/// Tolerance on the total probability.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// A diagonal (population-only) state of the collective-radiance model:
/// one probability per (J, M) pair, aggregated over all degenerate copies
/// of the sector.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalState {
    basis: DickeBasis,
    p: Vec<f64>,
}

impl DiagonalState {
    /// Wrap a probability vector over the basis index space, validating
    /// positivity and normalization.
    pub fn new(basis: DickeBasis, p: Vec<f64>) -> Result<Self> {
        if p.len() != basis.n_states() {
            return Err(Error::InvalidArgument(format!(
                "probability vector length {} does not match the {}-state basis",
                p.len(),
                basis.n_states()
            )));
        }
        let state = Self { basis, p };
        state.validate()?;
        Ok(state)
    }

    /// All population in a single (J, M) state.
    pub fn pure(basis: DickeBasis, two_j: u32, two_m: i32) -> Result<Self> {
        let idx = basis.index_of(two_j, two_m).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "(2J, 2M) = ({two_j}, {two_m}) is not in the ladder space"
            ))
        })?;
        let mut p = vec![0.0; basis.n_states()];
        p[idx] = 1.0;
        Ok(Self { basis, p })
    }

    /// Every atom in its ground state: the (J = N/2, M = -N/2) corner.
    pub fn all_ground(basis: DickeBasis) -> Self {
        let n = basis.n_atoms();
        Self::pure(basis, n, -(n as i32)).expect("stretched state always exists")
    }

    pub fn basis(&self) -> &DickeBasis {
        &self.basis
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn probability(&self, two_j: u32, two_m: i32) -> Option<f64> {
        self.basis.index_of(two_j, two_m).map(|i| self.p[i])
    }

    pub fn validate(&self) -> Result<()> {
        let mut sum = 0.0;
        for (i, &v) in self.p.iter().enumerate() {
            if !v.is_finite() || v < -POSITIVITY_TOL {
                let (two_j, two_m) = self.basis.state_at(i);
                return Err(Error::NumericalFailure(format!(
                    "probability {v:e} at (2J, 2M) = ({two_j}, {two_m}) violates positivity"
                )));
            }
            sum += v;
        }
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NumericalFailure(format!(
                "total probability {sum} deviates from 1 beyond {NORMALIZATION_TOL:e}"
            )));
        }
        Ok(())
    }

    /// Largest absolute componentwise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.p
            .iter()
            .zip(&other.p)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_state_is_normalized() {
        let basis = DickeBasis::new(4).unwrap();
        let state = DiagonalState::pure(basis, 4, 0).unwrap();
        assert_eq!(state.probability(4, 0), Some(1.0));
        state.validate().unwrap();
    }

    #[test]
    fn rejects_wrong_length_and_bad_values() {
        let basis = DickeBasis::new(2).unwrap();
        assert!(DiagonalState::new(basis.clone(), vec![1.0]).is_err());
        assert!(DiagonalState::new(basis.clone(), vec![0.5, 0.5, 0.5, 0.5]).is_err());
        assert!(DiagonalState::new(basis.clone(), vec![1.5, -0.5, 0.0, 0.0]).is_err());
        assert!(DiagonalState::new(basis, vec![0.25; 4]).is_ok());
    }

    #[test]
    fn all_ground_sits_at_the_ladder_bottom() {
        let basis = DickeBasis::new(5).unwrap();
        let state = DiagonalState::all_ground(basis);
        assert_eq!(state.probability(5, -5), Some(1.0));
    }
}
