//! Dense operators on the bare N-spin product space (and its extension by a
//! truncated bosonic mode), indexed by bitmask: bit `n` set means atom `n`
//! excited. Joint atom-cavity states are indexed `n_phot * 2^N + atoms`.

use nalgebra::DMatrix;

/// 2^n.
pub fn atomic_dim(n_atoms: u32) -> usize {
    1usize << n_atoms
}

/// Raising operator on one site.
pub fn sigma_plus(n_atoms: u32, site: u32) -> DMatrix<f64> {
    let dim = atomic_dim(n_atoms);
    let bit = 1usize << site;
    let mut m = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        if s & bit == 0 {
            m[(s | bit, s)] = 1.0;
        }
    }
    m
}

/// Lowering operator on one site.
pub fn sigma_minus(n_atoms: u32, site: u32) -> DMatrix<f64> {
    sigma_plus(n_atoms, site).transpose()
}

/// Collective lowering operator, the sum of all single-site lowerings.
pub fn collective_lowering(n_atoms: u32) -> DMatrix<f64> {
    let dim = atomic_dim(n_atoms);
    let mut m = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        for site in 0..n_atoms {
            let bit = 1usize << site;
            if s & bit != 0 {
                m[(s & !bit, s)] += 1.0;
            }
        }
    }
    m
}

/// z component of the collective spin, diagonal in the product basis.
pub fn collective_jz(n_atoms: u32) -> DMatrix<f64> {
    let dim = atomic_dim(n_atoms);
    DMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            (r.count_ones() as f64) - n_atoms as f64 / 2.0
        } else {
            0.0
        }
    })
}

/// Total-spin operator J^2 = J_+ J_- + J_z^2 - J_z.
pub fn collective_j_squared(n_atoms: u32) -> DMatrix<f64> {
    let lower = collective_lowering(n_atoms);
    let jz = collective_jz(n_atoms);
    lower.transpose() * &lower + &jz * &jz - jz
}

/// Total excited-state population, sum of the single-site projectors.
pub fn total_population(n_atoms: u32) -> DMatrix<f64> {
    let dim = atomic_dim(n_atoms);
    DMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            r.count_ones() as f64
        } else {
            0.0
        }
    })
}

/// Permutation swapping two atoms.
pub fn swap_atoms(n_atoms: u32, a: u32, b: u32) -> DMatrix<f64> {
    let dim = atomic_dim(n_atoms);
    let bit_a = 1usize << a;
    let bit_b = 1usize << b;
    let mut m = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        let has_a = s & bit_a != 0;
        let has_b = s & bit_b != 0;
        let mut t = s;
        if has_a != has_b {
            t ^= bit_a | bit_b;
        }
        m[(t, s)] = 1.0;
    }
    m
}

/// Bosonic annihilation operator on the truncated Fock space {0..n_max}.
pub fn fock_annihilation(n_max: u32) -> DMatrix<f64> {
    let dim = n_max as usize + 1;
    let mut m = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = (n as f64).sqrt();
    }
    m
}

/// Kronecker product lifting: cavity operator on the left factor, atomic
/// operator on the right factor of the joint index `n_phot * 2^N + atoms`.
pub fn joint(cavity_op: &DMatrix<f64>, atomic_op: &DMatrix<f64>) -> DMatrix<f64> {
    cavity_op.kronecker(atomic_op)
}

pub fn identity(dim: usize) -> DMatrix<f64> {
    DMatrix::identity(dim, dim)
}
