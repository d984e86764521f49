//! Steady-state collective radiance of an incoherently pumped ensemble of
//! two-level atoms with single-atom (`J_-`) or two-atom (`J_-^2`) collective
//! decay.
//!
//! Because the dynamics carries no Hamiltonian and both dissipators map
//! populations of the collective basis |J, M> to populations, the ensemble
//! reduces to a classical master equation on the Dicke ladder. The crate
//! provides:
//!
//! * [`basis`] — the (J, M) ladder space with exact sector multiplicities;
//! * [`generator`] — the population-transfer generator for pumping and
//!   collective decay;
//! * [`solver`] — stationary distributions and time evolution;
//! * [`observables`] — radiance observables (collective occupation,
//!   atom-atom correlation, spin squeezing, photon correlations);
//! * [`meanfield`] — the cumulant closure and its closed-form steady state
//!   for the single-atom-decay channel;
//! * [`oracle`] — brute-force full-Hilbert-space solvers used as ground
//!   truth for everything above;
//! * [`model`] — parameter sets and the circuit-to-collective rate
//!   conversion.

pub mod basis;
pub mod error;
pub mod generator;
pub mod meanfield;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod solver;
pub mod state;

pub use basis::{degeneracy, ladder_coefficient, DickeBasis, Sector, MAX_ATOMS};
pub use error::{Error, Result};
pub use generator::RateGenerator;
pub use model::{effective_rates, CircuitParams, EffectiveRates, ModelParams, DEFAULT_EPSILON_HZ};
pub use observables::{LadderDistribution, ObservableSet};
pub use solver::{evolve, steady_state, SteadyState, STEADY_RESIDUAL_TOL};
pub use state::DiagonalState;
