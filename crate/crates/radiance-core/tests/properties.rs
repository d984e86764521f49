//! Property tests over randomly drawn ensemble sizes, rates and states.

use proptest::prelude::*;

use radiance_core::observables::{inversion_moments, ladder_moment};
use radiance_core::{
    evolve, steady_state, DiagonalState, DickeBasis, ModelParams, RateGenerator,
    STEADY_RESIDUAL_TOL,
};

fn rates() -> impl Strategy<Value = (f64, f64, f64)> {
    (1e-3f64..1e2, 0.0f64..10.0, 0.0f64..10.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generator_is_conservative((gp, g1, g2) in rates(), n in 1u32..=12) {
        let basis = DickeBasis::new(n).unwrap();
        let params = ModelParams::new(n, gp, g1, g2).unwrap();
        let gen = RateGenerator::build(&basis, &params).unwrap();
        let scale = gen.max_outflow().max(1.0);
        for sum in gen.column_sums() {
            prop_assert!(sum.abs() <= 1e-12 * scale);
        }
        for col in 0..gen.dim() {
            for &(_, rate) in gen.column(col) {
                prop_assert!(rate >= 0.0);
            }
        }
    }

    #[test]
    fn stationary_distributions_are_valid((gp, g1, g2) in rates(), n in 1u32..=10) {
        let basis = DickeBasis::new(n).unwrap();
        let params = ModelParams::new(n, gp, g1, g2).unwrap();
        let gen = RateGenerator::build(&basis, &params).unwrap();
        let solved = steady_state(&gen).unwrap();
        prop_assert!(solved.residual <= STEADY_RESIDUAL_TOL);
        let total: f64 = solved.state.probabilities().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        prop_assert!(solved.state.probabilities().iter().all(|&p| p >= -1e-15));
    }

    #[test]
    fn collective_occupation_identity(n in 1u32..=12, seed in 0u64..1_000_000) {
        // <J_+ J_-> = <J^2> - <J_z^2> + <J_z> on any ladder distribution
        let basis = DickeBasis::new(n).unwrap();
        let dim = basis.n_states();
        let mut weights: Vec<f64> = (0..dim)
            .map(|i| {
                let mixed = seed
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add((i as u64).wrapping_mul(1442695040888963407));
                mixed as f64 / u64::MAX as f64 + 1e-3
            })
            .collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let state = DiagonalState::new(basis, weights).unwrap();
        let (jz, jz2, jsq) = inversion_moments(&state);
        let direct = ladder_moment(&state, 1);
        prop_assert!((direct - (jsq - jz2 + jz)).abs() <= 1e-10 * (1.0 + direct.abs()));
    }

    #[test]
    fn evolution_conserves_mass((gp, g1, g2) in rates(), n in 1u32..=8, t in 0.0f64..3.0) {
        let basis = DickeBasis::new(n).unwrap();
        let params = ModelParams::new(n, gp, g1, g2).unwrap();
        let gen = RateGenerator::build(&basis, &params).unwrap();
        let initial = DiagonalState::all_ground(basis);
        let evolved = evolve(&gen, &initial, t, 0.1).unwrap();
        let total: f64 = evolved.probabilities().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        prop_assert!(evolved.probabilities().iter().all(|&p| p >= 0.0));
    }
}
