//! Steady-state radiance observables of a diagonal ladder state.
//!
//! All quantities are plain weighted sums over (J, M) populations: on the
//! diagonal of the collective basis `<J_+^k J_-^k> = sum p(J,M) A_k(J,M)^2`,
//! `<J_z> = sum p M`, and the transverse first moments vanish.

use crate::basis::ladder_coefficient_sq_unchecked;
use crate::error::{Error, Result};
use crate::state::DiagonalState;

/// Every observable reported for one steady state.
///
/// `g2_1` and `g2_2` are `None` when the corresponding correlation function
/// is undefined (numerator and denominator both vanish).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableSet {
    /// <J_+ J_->: collective occupation.
    pub jpjm: f64,
    /// <J_+^2 J_-^2>.
    pub jp2jm2: f64,
    /// <J_+^4 J_-^4>.
    pub jp4jm4: f64,
    /// <J_z>.
    pub jz: f64,
    /// <J_z^2>.
    pub jz2: f64,
    /// <J^2> (total spin).
    pub jsq: f64,
    /// Total excited-state population of the individual atoms, N/2 + <J_z>.
    pub sum_pop: f64,
    /// Atom-atom correlation (collective minus independent occupation per atom).
    pub r_f: f64,
    /// Mean single-atom inversion, 2 <J_z> / N.
    pub sigma_z: f64,
    /// Spin squeezing witness.
    pub xi2: f64,
    /// Second-order photon correlation for single-atom decay emission.
    pub g2_1: Option<f64>,
    /// Second-order photon correlation for two-atom decay emission.
    pub g2_2: Option<f64>,
}

impl ObservableSet {
    /// Evaluate every observable on a diagonal state.
    pub fn compute(state: &DiagonalState) -> Self {
        let jpjm = ladder_moment(state, 1);
        let jp2jm2 = ladder_moment(state, 2);
        let jp4jm4 = ladder_moment(state, 4);
        let (jz, jz2, jsq) = inversion_moments(state);
        let n = state.basis().n_atoms() as f64;
        let sum_pop = n / 2.0 + jz;
        Self {
            jpjm,
            jp2jm2,
            jp4jm4,
            jz,
            jz2,
            jsq,
            sum_pop,
            r_f: (jpjm - sum_pop) / n,
            sigma_z: 2.0 * jz / n,
            xi2: spin_squeezing(state),
            g2_1: g2(state, 1).ok(),
            g2_2: g2(state, 2).ok(),
        }
    }
}

/// `<J_+^k J_-^k>` for k in {1, 2, 4}.
pub fn ladder_moment(state: &DiagonalState, k: u32) -> f64 {
    debug_assert!(matches!(k, 1 | 2 | 4));
    state
        .basis()
        .iter_states()
        .map(|(two_j, two_m, idx)| {
            state.probabilities()[idx] * ladder_coefficient_sq_unchecked(two_j, two_m, k)
        })
        .sum()
}

/// `(<J_z>, <J_z^2>, <J^2>)`.
pub fn inversion_moments(state: &DiagonalState) -> (f64, f64, f64) {
    let mut jz = 0.0;
    let mut jz2 = 0.0;
    let mut jsq = 0.0;
    for (two_j, two_m, idx) in state.basis().iter_states() {
        let p = state.probabilities()[idx];
        let m = two_m as f64 / 2.0;
        let j = two_j as f64 / 2.0;
        jz += p * m;
        jz2 += p * m * m;
        jsq += p * j * (j + 1.0);
    }
    (jz, jz2, jsq)
}

/// Atom-atom correlation: `[<J_+ J_-> - (N/2 + <J_z>)] / N`. Positive when
/// correlations enhance the collective occupation, negative when they
/// suppress it.
pub fn atom_atom_correlation(state: &DiagonalState) -> f64 {
    let n = state.basis().n_atoms() as f64;
    let (jz, _, _) = inversion_moments(state);
    (ladder_moment(state, 1) - (n / 2.0 + jz)) / n
}

/// Spin squeezing witness `2 [<J^2> - <J_z>^2] / N`; values below one signal
/// entanglement. On diagonal states the transverse first moments vanish and
/// `<J_x^2 + J_y^2> = <J^2 - J_z^2>`, which collapses the three-variance sum
/// to this form.
pub fn spin_squeezing(state: &DiagonalState) -> f64 {
    let n = state.basis().n_atoms() as f64;
    let (jz, _, jsq) = inversion_moments(state);
    2.0 * (jsq - jz * jz) / n
}

/// Equal-time second-order correlation of the emitted field.
///
/// Order 1 (single-atom decay channel): `<J_+^2 J_-^2> / <J_+ J_->^2`.
/// Order 2 (two-atom decay channel): `<J_+^4 J_-^4> / <J_+^2 J_-^2>^2`.
pub fn g2(state: &DiagonalState, order: u32) -> Result<f64> {
    let (numerator, denominator) = match order {
        1 => (ladder_moment(state, 2), ladder_moment(state, 1)),
        2 => (ladder_moment(state, 4), ladder_moment(state, 2)),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "correlation order {order} not in {{1, 2}}"
            )))
        }
    };
    if denominator <= 0.0 {
        return Err(Error::UndefinedCorrelation(format!(
            "order-{order} denominator moment vanishes"
        )));
    }
    Ok(numerator / (denominator * denominator))
}

/// Population distribution keyed by (J, M), for ladder-map export.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderDistribution {
    entries: Vec<LadderEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderEntry {
    pub two_j: u32,
    pub two_m: i32,
    pub probability: f64,
}

impl LadderEntry {
    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn m(&self) -> f64 {
        self.two_m as f64 / 2.0
    }
}

impl LadderDistribution {
    pub fn entries(&self) -> &[LadderEntry] {
        &self.entries
    }
}

/// Re-express the state as (J, M, probability) triples in basis order.
pub fn ladder_distribution(state: &DiagonalState) -> LadderDistribution {
    let entries = state
        .basis()
        .iter_states()
        .map(|(two_j, two_m, idx)| LadderEntry {
            two_j,
            two_m,
            probability: state.probabilities()[idx],
        })
        .collect();
    LadderDistribution { entries }
}
