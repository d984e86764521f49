//! Stationary and time-evolved populations of the radiance generator.
//!
//! The stationary distribution is computed by state-elimination Gaussian
//! reduction in the Grassmann-Taksar-Heyman form: each elimination step
//! redistributes the flow through the removed state onto the remaining
//! ones using only additions and multiplications of nonnegative rates, so
//! the result is componentwise accurate no matter how many orders of
//! magnitude the rates span. Under the sector ordering of
//! [`DickeBasis`](crate::basis::DickeBasis) every transition connects
//! states at most `N + 1` indices apart and the banded structure survives
//! the elimination, which keeps the solve at `O(n (N+1)^2)`.

use crate::basis::ladder_coefficient_sq_unchecked;
use crate::error::{Error, Result};
use crate::generator::RateGenerator;
use crate::state::DiagonalState;

/// Acceptance bound on ||G p||_inf relative to the row magnitude of G.
pub const STEADY_RESIDUAL_TOL: f64 = 1e-10;

/// Result of a stationary solve: the distribution and its scaled residual.
#[derive(Debug, Clone)]
pub struct SteadyState {
    pub state: DiagonalState,
    /// ||G p||_inf / ||G||_inf.
    pub residual: f64,
}

/// Solve G p = 0, sum(p) = 1 for the unique stationary distribution.
///
/// Requires `gamma_p > 0`; without pumping every (J, -J) state (and, for
/// two-atom decay alone, every (J, -J+1) state) is dark and the stationary
/// distribution is not unique. When pumping is the only active process the
/// fully stretched state absorbs all population and is returned exactly.
pub fn steady_state(gen: &RateGenerator) -> Result<SteadyState> {
    let params = gen.params();
    if params.gamma_p <= 0.0 {
        return Err(Error::NonUniqueSteadyState(
            "gamma_p = 0 leaves dark states; the stationary distribution is not unique".into(),
        ));
    }

    let basis = gen.basis();
    let decay_active = basis.iter_states().any(|(two_j, two_m, _)| {
        (params.gamma_1 > 0.0 && ladder_coefficient_sq_unchecked(two_j, two_m, 1) > 0.0)
            || (params.gamma_2 > 0.0 && ladder_coefficient_sq_unchecked(two_j, two_m, 2) > 0.0)
    });
    if !decay_active {
        // Pumping alone absorbs everything in the fully excited state.
        let n = basis.n_atoms();
        let state = DiagonalState::pure(basis.clone(), n, n as i32)?;
        return Ok(SteadyState {
            state,
            residual: 0.0,
        });
    }

    let p = gth_stationary_banded(gen)?;

    // Residual against the original generator.
    let dim = gen.dim();
    let mut gp = vec![0.0; dim];
    gen.apply(&p, &mut gp);
    let norm = gen.inf_norm().max(f64::MIN_POSITIVE);
    let residual = gp.iter().fold(0.0f64, |acc, v| acc.max(v.abs())) / norm;
    if residual > STEADY_RESIDUAL_TOL {
        return Err(Error::NumericalFailure(format!(
            "stationary residual {residual:e} exceeds {STEADY_RESIDUAL_TOL:e}"
        )));
    }

    let state = DiagonalState::new(basis.clone(), p)?;
    Ok(SteadyState { state, residual })
}

/// Grassmann-Taksar-Heyman elimination on the banded generator.
///
/// States are eliminated from the last index down to the first; the
/// redistributed flow `j -> k -> i` only ever touches indices below `k`,
/// and all indices involved lie within one bandwidth of `k`, so fill-in
/// never leaves the band.
fn gth_stationary_banded(gen: &RateGenerator) -> Result<Vec<f64>> {
    let n = gen.dim();
    let bandwidth = gen.basis().n_atoms() as usize + 1;
    let width = 2 * bandwidth + 1;

    // band[c * width + (r - c + bandwidth)] = off-diagonal rate G[r, c].
    let mut band = vec![0.0f64; n * width];
    for col in 0..n {
        for &(dest, rate) in gen.column(col) {
            let offset = dest as isize - col as isize;
            debug_assert!(offset.unsigned_abs() <= bandwidth);
            band[col * width + (offset + bandwidth as isize) as usize] += rate;
        }
    }

    let entry = |band: &[f64], r: usize, c: usize| -> f64 {
        band[c * width + (r as isize - c as isize + bandwidth as isize) as usize]
    };

    // Elimination: fold state k into the states below it.
    let mut departure = vec![0.0f64; n];
    for k in (1..n).rev() {
        let lo = k.saturating_sub(bandwidth);
        let mut s = 0.0;
        for i in lo..k {
            s += entry(&band, i, k);
        }
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::NumericalFailure(format!(
                "state {k} has no flow toward the remaining states; the chain is reducible"
            )));
        }
        departure[k] = s;
        for j in lo..k {
            let into_k = entry(&band, k, j);
            if into_k > 0.0 {
                let fraction = into_k / s;
                for i in lo..k {
                    let out_k = entry(&band, i, k);
                    if out_k > 0.0 {
                        band[j * width + (i as isize - j as isize + bandwidth as isize) as usize] +=
                            out_k * fraction;
                    }
                }
            }
        }
    }

    // Back substitution with periodic rescaling; the unnormalized masses can
    // span hundreds of orders of magnitude across regimes.
    let mut p = vec![0.0f64; n];
    p[0] = 1.0;
    for k in 1..n {
        let lo = k.saturating_sub(bandwidth);
        let mut inflow = 0.0;
        for (j, &mass) in p.iter().enumerate().take(k).skip(lo) {
            let rate = entry(&band, k, j);
            if rate > 0.0 {
                inflow += rate * mass;
            }
        }
        let value = inflow / departure[k];
        p[k] = value;
        if value > 1e200 {
            for v in p[..=k].iter_mut() {
                *v /= value;
            }
        }
    }

    let total: f64 = p.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::NumericalFailure(format!(
            "stationary elimination produced total mass {total}"
        )));
    }
    for v in &mut p {
        *v /= total;
    }
    Ok(p)
}

/// Propagate `dp/dt = G p` for `t_final` via uniformization.
///
/// The chain is embedded as `p(t) = e^{-a} sum_k a^k/k! P^k p` per segment
/// with `P = I + G/rate`, which keeps every intermediate vector elementwise
/// nonnegative and of unit mass. `dt_hint > 0` bounds the segment length;
/// segments are further split so the Poisson series stays short.
pub fn evolve(
    gen: &RateGenerator,
    initial: &DiagonalState,
    t_final: f64,
    dt_hint: f64,
) -> Result<DiagonalState> {
    if initial.basis() != gen.basis() {
        return Err(Error::InvalidArgument(
            "initial state and generator use different bases".into(),
        ));
    }
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "t_final must be finite and nonnegative, got {t_final}"
        )));
    }
    if t_final == 0.0 {
        return Ok(initial.clone());
    }
    if !(dt_hint.is_finite() && dt_hint > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "dt_hint must be a positive time, got {dt_hint}"
        )));
    }

    let rate = gen.max_outflow();
    if rate == 0.0 {
        return Ok(initial.clone());
    }

    const MAX_SERIES_WEIGHT: f64 = 500.0;
    let hint_segments = (t_final / dt_hint).ceil().max(1.0);
    let stability_segments = (rate * t_final / MAX_SERIES_WEIGHT).ceil().max(1.0);
    let segments = hint_segments.max(stability_segments);
    if segments > 1e9 {
        return Err(Error::NumericalFailure(format!(
            "step-size failure: {segments:e} uniformization segments requested"
        )));
    }
    let segments = segments as u64;
    let dt = t_final / segments as f64;
    let a = rate * dt;

    let dim = gen.dim();
    // Column-stochastic survival factors 1 + diag/rate, clamped at zero.
    let survive: Vec<f64> = gen
        .diagonal()
        .iter()
        .map(|d| (1.0 + d / rate).max(0.0))
        .collect();
    let step = |x: &[f64], y: &mut [f64]| {
        for i in 0..dim {
            y[i] = survive[i] * x[i];
        }
        for (col, &xc) in x.iter().enumerate() {
            if xc != 0.0 {
                for &(dest, r) in gen.column(col) {
                    y[dest] += r / rate * xc;
                }
            }
        }
    };

    let k_cap = (a + 60.0 * (a.sqrt() + 1.0)).ceil() as u64;
    let mut p = initial.probabilities().to_vec();
    let mut power = vec![0.0; dim];
    let mut next_power = vec![0.0; dim];
    let mut acc = vec![0.0; dim];

    for _ in 0..segments {
        power.copy_from_slice(&p);
        let mut weight = (-a).exp();
        let mut cumulative = weight;
        for (acc_i, pow_i) in acc.iter_mut().zip(&power) {
            *acc_i = weight * pow_i;
        }
        let mut k = 0u64;
        // The truncated tail is redistributed by the renormalization below;
        // stop once it is negligible or the weights have decayed past the
        // Poisson peak.
        while 1.0 - cumulative > 1e-13 && !(k as f64 > a && weight < 1e-17) {
            k += 1;
            if k > k_cap {
                return Err(Error::NumericalFailure(
                    "uniformization series failed to converge within its cap".into(),
                ));
            }
            step(&power, &mut next_power);
            std::mem::swap(&mut power, &mut next_power);
            weight *= a / k as f64;
            cumulative += weight;
            for (acc_i, pow_i) in acc.iter_mut().zip(&power) {
                *acc_i += weight * pow_i;
            }
        }
        let total: f64 = acc.iter().sum();
        for (p_i, acc_i) in p.iter_mut().zip(&acc) {
            *p_i = acc_i / total;
        }
    }

    DiagonalState::new(gen.basis().clone(), p)
}
