//! Assembly of the classical population-transfer generator on the Dicke
//! ladder space.
//!
//! With no Hamiltonian and jump operators that map (J, M) populations to
//! (J', M') populations, the master equation closes on the diagonal of the
//! collective basis and becomes a continuous-time Markov chain
//! `dp/dt = G p`:
//!
//! * collective decay moves population down a ladder, (J, M) -> (J, M-1)
//!   at rate `gamma_1 * A_1(J, M)^2` and (J, M) -> (J, M-2) at rate
//!   `gamma_2 * A_2(J, M)^2`;
//! * incoherent per-atom pumping moves population up and across ladders,
//!   (J, M) -> (J', M+1) with J' in {J-1, J, J+1}.
//!
//! The pumping branch rates follow from coupling the first N-1 spins to an
//! intermediate spin j = J -/+ 1/2 and attaching the last spin with
//! Clebsch-Gordan coefficients. With populations aggregated over the d_N^J
//! degenerate copies of each sector they read
//!
//! ```text
//! up:   gamma_p N (d_{N-1}^{J+1/2} / d_N^J) (J+M+1)(J+M+2) / (2J+2)^2
//! same: gamma_p N (J-M)(J+M+1) [ d_{N-1}^{J+1/2} / (d_N^J (2J+2)^2)
//!                              + d_{N-1}^{J-1/2} / (d_N^J (2J)^2) ]
//! down: gamma_p N (d_{N-1}^{J-1/2} / d_N^J) (J-M)(J-M-1) / (2J)^2
//! ```
//!
//! and their total is the per-state pump outflow `gamma_p (N/2 - M)`.

use crate::basis::{degeneracy_doubled, ladder_coefficient_sq_unchecked, DickeBasis};
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Sparse column-oriented generator of the classical master equation on
/// (J, M) populations. Off-diagonal entries are transition rates out of the
/// column's state; the diagonal holds the negated total outflow, so every
/// column sums to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RateGenerator {
    basis: DickeBasis,
    params: ModelParams,
    /// Off-diagonal flows per column: (destination index, rate >= 0).
    columns: Vec<Vec<(usize, f64)>>,
    /// Negated total outflow per state.
    diagonal: Vec<f64>,
}

/// Multiplicity ratios d_{N-1}^{J +/- 1/2} / d_N^J entering the pumping
/// branches of one sector.
#[derive(Debug, Clone, Copy)]
struct SectorRatios {
    upper: f64,
    lower: f64,
}

impl RateGenerator {
    /// Build the generator for the given basis and rates.
    pub fn build(basis: &DickeBasis, params: &ModelParams) -> Result<Self> {
        if basis.n_atoms() != params.n_atoms {
            return Err(Error::InvalidArgument(format!(
                "basis is for {} atoms but parameters are for {}",
                basis.n_atoms(),
                params.n_atoms
            )));
        }
        let n = params.n_atoms;
        let n_states = basis.n_states();
        let ratios = sector_ratios(basis);
        let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::with_capacity(5); n_states];
        let mut diagonal = vec![0.0; n_states];

        for (two_j, two_m, col) in basis.iter_states() {
            let mut outflow = 0.0;

            // Collective decay within the ladder.
            if params.gamma_1 > 0.0 {
                let a1_sq = ladder_coefficient_sq_unchecked(two_j, two_m, 1);
                if a1_sq > 0.0 {
                    let dest = basis.index_of(two_j, two_m - 2).expect("M-1 in ladder");
                    let rate = params.gamma_1 * a1_sq;
                    columns[col].push((dest, rate));
                    outflow += rate;
                }
            }
            if params.gamma_2 > 0.0 {
                let a2_sq = ladder_coefficient_sq_unchecked(two_j, two_m, 2);
                if a2_sq > 0.0 {
                    let dest = basis.index_of(two_j, two_m - 4).expect("M-2 in ladder");
                    let rate = params.gamma_2 * a2_sq;
                    columns[col].push((dest, rate));
                    outflow += rate;
                }
            }

            // Local pumping across the three J branches.
            if params.gamma_p > 0.0 {
                let sector = basis.sector_position(two_j).expect("state in basis");
                for ((two_j_dst, two_m_dst), rate) in
                    pump_branch_rates(n, two_j, two_m, ratios[sector])
                {
                    if rate > 0.0 {
                        let dest = basis
                            .index_of(two_j_dst, two_m_dst)
                            .expect("pump destination in ladder");
                        let rate = params.gamma_p * rate;
                        columns[col].push((dest, rate));
                        outflow += rate;
                    }
                }
            }

            diagonal[col] = -outflow;
        }

        Ok(Self {
            basis: basis.clone(),
            params: *params,
            columns,
            diagonal,
        })
    }

    pub fn basis(&self) -> &DickeBasis {
        &self.basis
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// Off-diagonal flows out of state `col` as (destination, rate) pairs.
    pub fn column(&self, col: usize) -> &[(usize, f64)] {
        &self.columns[col]
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// Matrix entry G[row, col].
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        if row == col {
            return self.diagonal[col];
        }
        self.columns[col]
            .iter()
            .find(|&&(dest, _)| dest == row)
            .map_or(0.0, |&(_, rate)| rate)
    }

    /// y = G x.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim());
        debug_assert_eq!(y.len(), self.dim());
        for (i, y_i) in y.iter_mut().enumerate() {
            *y_i = self.diagonal[i] * x[i];
        }
        for (col, flows) in self.columns.iter().enumerate() {
            let x_col = x[col];
            if x_col != 0.0 {
                for &(dest, rate) in flows {
                    y[dest] += rate * x_col;
                }
            }
        }
    }

    /// Largest absolute row sum (the natural magnitude scale of G).
    pub fn inf_norm(&self) -> f64 {
        let mut row_sums: Vec<f64> = self.diagonal.iter().map(|d| d.abs()).collect();
        for flows in &self.columns {
            for &(dest, rate) in flows {
                row_sums[dest] += rate;
            }
        }
        row_sums.into_iter().fold(0.0, f64::max)
    }

    /// Largest total outflow rate, i.e. `max |diag|`.
    pub fn max_outflow(&self) -> f64 {
        self.diagonal.iter().map(|d| d.abs()).fold(0.0, f64::max)
    }

    /// Column sums (zero up to roundoff for a conservative generator).
    pub fn column_sums(&self) -> Vec<f64> {
        self.columns
            .iter()
            .zip(&self.diagonal)
            .map(|(flows, d)| d + flows.iter().map(|&(_, r)| r).sum::<f64>())
            .collect()
    }
}

/// Degeneracy ratios for every sector of the basis, in sector order.
fn sector_ratios(basis: &DickeBasis) -> Vec<SectorRatios> {
    let n = basis.n_atoms();
    basis
        .sectors()
        .iter()
        .map(|s| {
            let d_j = s.degeneracy as f64;
            let two_j = s.two_j;
            let upper = if n >= 2 && two_j < n - 1 {
                degeneracy_doubled(n - 1, two_j + 1).expect("admissible") as f64 / d_j
            } else {
                0.0
            };
            let lower = if two_j >= 1 {
                if n >= 2 {
                    degeneracy_doubled(n - 1, two_j - 1).expect("admissible") as f64 / d_j
                } else {
                    // single atom: the intermediate is the zero-spin vacuum
                    1.0
                }
            } else {
                0.0
            };
            SectorRatios { upper, lower }
        })
        .collect()
}

/// The three pumping branch rates out of (J, M), as
/// ((two_j', two_m + 2), rate / gamma_p) tuples. Branches that leave the
/// ladder space carry zero rate and are omitted.
fn pump_branch_rates(
    n_atoms: u32,
    two_j: u32,
    two_m: i32,
    ratios: SectorRatios,
) -> Vec<((u32, i32), f64)> {
    let n = n_atoms as f64;
    let two_m_dst = two_m + 2;
    let jm_plus = (two_j as i32 + two_m) as f64 / 2.0; // J + M
    let jm_minus = (two_j as i32 - two_m) as f64 / 2.0; // J - M

    let mut branches = Vec::with_capacity(3);

    // J -> J + 1 through the intermediate j = J + 1/2.
    if ratios.upper > 0.0 {
        let rate =
            n * ratios.upper * (jm_plus + 1.0) * (jm_plus + 2.0) / (two_j as f64 + 2.0).powi(2);
        branches.push(((two_j + 2, two_m_dst), rate));
    }

    // J -> J within the same ladder; both intermediates contribute.
    let same_weight = jm_minus * (jm_plus + 1.0);
    if same_weight > 0.0 {
        let mut rate = ratios.upper / (two_j as f64 + 2.0).powi(2);
        if two_j > 0 {
            rate += ratios.lower / (two_j as f64).powi(2);
        }
        branches.push(((two_j, two_m_dst), n * same_weight * rate));
    }

    // J -> J - 1 through the intermediate j = J - 1/2.
    if two_j >= 2 && ratios.lower > 0.0 {
        let weight = jm_minus * (jm_minus - 1.0);
        if weight > 0.0 {
            let rate = n * ratios.lower * weight / (two_j as f64).powi(2);
            branches.push(((two_j - 2, two_m_dst), rate));
        }
    }

    branches
}
