//! The permutation-invariant Dicke ladder basis for `N` two-level atoms.
//!
//! The `2^N`-dimensional product space decomposes into total-spin sectors
//! `J = N/2, N/2-1, ...` down to `0` (even `N`) or `1/2` (odd `N`), each
//! appearing with multiplicity `d_N^J`. A sector carries the ladder of
//! magnetic quantum numbers `M = -J..J`. Half-integer quantum numbers are
//! stored doubled (`two_j = 2J`, `two_m = 2M`) so all bookkeeping stays in
//! integer arithmetic.

use crate::error::{Error, Result};

/// Largest supported ensemble size. Degeneracies are kept exact in `u128`;
/// Pascal-triangle binomials stay well inside `u128` up to this row.
pub const MAX_ATOMS: u32 = 120;

/// One total-spin sector: the spin quantum number (doubled) and the number of
/// independent copies of that irreducible block in the product space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sector {
    pub two_j: u32,
    pub degeneracy: u128,
}

impl Sector {
    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    /// Ladder length 2J+1.
    pub fn multiplicity(&self) -> usize {
        self.two_j as usize + 1
    }
}

/// Enumeration of the (J, M) ladder space for a fixed atom number, with a
/// contiguous index for every (J, M) pair.
///
/// Sectors are ordered by descending J; within a sector the index runs over
/// M ascending from -J to J.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DickeBasis {
    n_atoms: u32,
    sectors: Vec<Sector>,
    /// Start offset of each sector in the (J, M) index space.
    offsets: Vec<usize>,
    n_states: usize,
}

impl DickeBasis {
    /// Build the basis for `n_atoms` spins.
    pub fn new(n_atoms: u32) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::InvalidArgument(
                "atom number must be positive".into(),
            ));
        }
        if n_atoms > MAX_ATOMS {
            return Err(Error::InvalidArgument(format!(
                "atom number {n_atoms} exceeds the supported maximum {MAX_ATOMS}"
            )));
        }
        let mut sectors = Vec::new();
        let mut offsets = Vec::new();
        let mut n_states = 0usize;
        // two_j runs N, N-2, ..., down to 0 or 1.
        let mut two_j = n_atoms;
        loop {
            sectors.push(Sector {
                two_j,
                degeneracy: degeneracy_doubled(n_atoms, two_j)?,
            });
            offsets.push(n_states);
            n_states += two_j as usize + 1;
            if two_j < 2 {
                break;
            }
            two_j -= 2;
        }
        Ok(Self {
            n_atoms,
            sectors,
            offsets,
            n_states,
        })
    }

    pub fn n_atoms(&self) -> u32 {
        self.n_atoms
    }

    /// Total number of (J, M) pairs.
    pub fn n_states(&self) -> usize {
        self.n_states
    }

    /// Sectors in descending-J order.
    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    /// Position of sector `two_j` in the descending-J sector list.
    pub fn sector_position(&self, two_j: u32) -> Option<usize> {
        if two_j > self.n_atoms || !(self.n_atoms - two_j).is_multiple_of(2) {
            return None;
        }
        Some(((self.n_atoms - two_j) / 2) as usize)
    }

    /// Index offset of a sector's M = -J entry.
    pub fn sector_offset(&self, two_j: u32) -> Option<usize> {
        self.sector_position(two_j).map(|k| self.offsets[k])
    }

    /// Contiguous index of the (J, M) pair, if admissible.
    pub fn index_of(&self, two_j: u32, two_m: i32) -> Option<usize> {
        let offset = self.sector_offset(two_j)?;
        let two_j = two_j as i32;
        if two_m.abs() > two_j || (two_j - two_m) % 2 != 0 {
            return None;
        }
        Some(offset + ((two_m + two_j) / 2) as usize)
    }

    /// Inverse of [`index_of`](Self::index_of).
    pub fn state_at(&self, index: usize) -> (u32, i32) {
        debug_assert!(index < self.n_states);
        // Sector sizes shrink by 2 going down the list; a linear scan over
        // at most N/2+1 sectors is cheap enough everywhere this is used.
        let k = match self.offsets.binary_search(&index) {
            Ok(k) => k,
            Err(k) => k - 1,
        };
        let two_j = self.sectors[k].two_j;
        let two_m = -(two_j as i32) + 2 * (index - self.offsets[k]) as i32;
        (two_j, two_m)
    }

    /// Iterate all (two_j, two_m, index) triples in index order.
    pub fn iter_states(&self) -> impl Iterator<Item = (u32, i32, usize)> + '_ {
        self.sectors.iter().enumerate().flat_map(move |(k, s)| {
            let offset = self.offsets[k];
            (0..=s.two_j as i32).map(move |step| {
                let two_m = -(s.two_j as i32) + 2 * step;
                (s.two_j, two_m, offset + step as usize)
            })
        })
    }
}

/// Multiplicity of the spin-J block for `n` spin-1/2 particles,
/// `d_n^J = C(n, n/2 - J) - C(n, n/2 - J - 1)`, exact in `u128`.
pub fn degeneracy(n_atoms: u32, j: f64) -> Result<u128> {
    let two_j = (2.0 * j).round();
    if (2.0 * j - two_j).abs() > 1e-9 || two_j < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "J = {j} is not a nonnegative half-integer"
        )));
    }
    degeneracy_doubled(n_atoms, two_j as u32)
}

/// Same as [`degeneracy`] with the doubled quantum number.
pub fn degeneracy_doubled(n_atoms: u32, two_j: u32) -> Result<u128> {
    if n_atoms == 0 || n_atoms > MAX_ATOMS {
        return Err(Error::InvalidArgument(format!(
            "atom number {n_atoms} out of supported range 1..={MAX_ATOMS}"
        )));
    }
    if two_j > n_atoms || !(n_atoms - two_j).is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "sector 2J = {two_j} is not admissible for {n_atoms} atoms"
        )));
    }
    let k = (n_atoms - two_j) / 2;
    let b1 = binomial(n_atoms, k);
    let b0 = if k == 0 { 0 } else { binomial(n_atoms, k - 1) };
    Ok(b1 - b0)
}

/// Binomial coefficient via Pascal's triangle; exact for n <= MAX_ATOMS.
fn binomial(n: u32, k: u32) -> u128 {
    debug_assert!(k <= n);
    let k = k.min(n - k) as usize;
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for _ in 0..n {
        for j in (1..=k).rev() {
            row[j] += row[j - 1];
        }
    }
    row[k]
}

/// Matrix element of the k-fold collective lowering operator,
/// `A_k(J, M) = prod_{i=0}^{k-1} A_1(J, M - i)` with
/// `A_1(J, M) = sqrt(J(J+1) - M(M-1))`; zero whenever a step would leave the
/// ladder.
pub fn ladder_coefficient(two_j: u32, two_m: i32, k: u32) -> Result<f64> {
    if two_m.abs() > two_j as i32 || (two_j as i32 - two_m) % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "(2J, 2M) = ({two_j}, {two_m}) is not a valid ladder state"
        )));
    }
    if !matches!(k, 1 | 2 | 4) {
        return Err(Error::InvalidArgument(format!(
            "ladder order k = {k} not in {{1, 2, 4}}"
        )));
    }
    Ok(ladder_coefficient_unchecked(two_j, two_m, k))
}

pub(crate) fn ladder_coefficient_unchecked(two_j: u32, two_m: i32, k: u32) -> f64 {
    ladder_coefficient_sq_unchecked(two_j, two_m, k).sqrt()
}

/// Squared ladder coefficient as an exact product of the integer-valued
/// factors `J(J+1) - M(M-1)`; avoids the sqrt/square round trip.
pub(crate) fn ladder_coefficient_sq_unchecked(two_j: u32, two_m: i32, k: u32) -> f64 {
    let mut product = 1.0;
    for step in 0..k as i32 {
        let two_m_here = two_m - 2 * step;
        if two_m_here - 2 < -(two_j as i32) {
            return 0.0;
        }
        // 4 [J(J+1) - M(M-1)] over 4, all in exact integer arithmetic
        let quadrupled =
            two_j as i64 * (two_j as i64 + 2) - two_m_here as i64 * (two_m_here as i64 - 2);
        product *= quadrupled as f64 / 4.0;
    }
    product
}
