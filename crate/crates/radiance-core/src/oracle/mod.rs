//! Brute-force ground truth on the bare product space.
//!
//! Everything here works on the full `2^N`-dimensional atomic space (or the
//! `(n_max+1) * 2^N` joint atom-cavity space) with no permutation-invariance
//! or ladder-structure assumptions, providing the independent reference for
//! the reduced solver and the observables.
//!
//! Stationary states are obtained from the exact excitation grading of the
//! dynamics: every term of the Liouvillian shifts the excitation count of
//! the two sides of `|a><b|` equally (photons count twice in the joint
//! model), so the superoperator is block diagonal over the difference of
//! excitation counts and the unique stationary state lives entirely in the
//! difference-zero block. That block is solved directly with one row
//! replaced by the trace-normalization row. A dense whole-superoperator
//! route is kept alongside for small dimensions to cross-check the graded
//! solve, including that the out-of-block coherences of the stationary
//! state vanish instead of being imposed.

pub mod hilbert;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::basis::DickeBasis;
use crate::error::{Error, Result};
use crate::observables::ObservableSet;
use crate::state::DiagonalState;

/// Which model a Liouvillian was built for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelTag {
    /// Pumping plus collective decay on the atomic space.
    AtomicOnly {
        n_atoms: u32,
        gamma_p: f64,
        gamma_1: f64,
        gamma_2: f64,
    },
    /// Two-excitation exchange with a truncated cavity mode.
    AtomCavity {
        n_atoms: u32,
        n_max: u32,
        lambda: f64,
        kappa_a: f64,
        gamma_p: f64,
    },
}

impl ModelTag {
    pub fn n_atoms(&self) -> u32 {
        match *self {
            ModelTag::AtomicOnly { n_atoms, .. } | ModelTag::AtomCavity { n_atoms, .. } => n_atoms,
        }
    }

    pub fn gamma_p(&self) -> f64 {
        match *self {
            ModelTag::AtomicOnly { gamma_p, .. } | ModelTag::AtomCavity { gamma_p, .. } => gamma_p,
        }
    }

    pub fn n_max(&self) -> Option<u32> {
        match *self {
            ModelTag::AtomicOnly { .. } => None,
            ModelTag::AtomCavity { n_max, .. } => Some(n_max),
        }
    }
}

struct Jump {
    rate: f64,
    op: DMatrix<f64>,
    op_c: DMatrix<C64>,
    /// O^dag O, real.
    odo: DMatrix<f64>,
    odo_c: DMatrix<C64>,
}

impl Jump {
    fn new(rate: f64, op: DMatrix<f64>) -> Self {
        let odo = op.transpose() * &op;
        Self {
            rate,
            op_c: op.map(|x| C64::new(x, 0.0)),
            odo_c: odo.map(|x| C64::new(x, 0.0)),
            op,
            odo,
        }
    }
}

/// The full-space generator of the dissipative dynamics, kept as its
/// Hamiltonian and jump operators; the superoperator matrix is materialized
/// on demand.
pub struct FullLiouvillian {
    tag: ModelTag,
    dim: usize,
    hamiltonian: Option<DMatrix<f64>>,
    jumps: Vec<Jump>,
}

/// Dense density matrix on the product space.
#[derive(Debug, Clone, PartialEq)]
pub struct FullState {
    pub n_atoms: u32,
    /// Fock cutoff when the state lives on the joint atom-cavity space.
    pub n_max: Option<u32>,
    pub rho: DMatrix<C64>,
}

/// Hermiticity and trace tolerance of a valid state.
pub const STATE_TOL: f64 = 1e-10;
/// Slack below zero allowed for density-matrix eigenvalues.
pub const EIGENVALUE_TOL: f64 = 1e-8;

impl FullState {
    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }

    pub fn validate(&self) -> Result<()> {
        let herm = (&self.rho - self.rho.adjoint()).camax();
        if herm > STATE_TOL {
            return Err(Error::NumericalFailure(format!(
                "state is not Hermitian: defect {herm:e}"
            )));
        }
        let trace = self.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::NumericalFailure(format!(
                "state trace {trace} deviates from one"
            )));
        }
        let herm_part = (&self.rho + self.rho.adjoint()).scale(0.5);
        let eigen = nalgebra::SymmetricEigen::new(herm_part);
        let min = eigen.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -EIGENVALUE_TOL {
            return Err(Error::NumericalFailure(format!(
                "state has eigenvalue {min:e} below -{EIGENVALUE_TOL:e}"
            )));
        }
        Ok(())
    }

    /// Reduce a joint atom-cavity state to the atoms.
    pub fn trace_out_cavity(&self) -> Result<FullState> {
        let n_max = self.n_max.ok_or_else(|| {
            Error::InvalidArgument("state has no cavity factor to trace out".into())
        })? as usize;
        let atomic = hilbert::atomic_dim(self.n_atoms);
        let mut rho = DMatrix::<C64>::zeros(atomic, atomic);
        for n in 0..=n_max {
            for s in 0..atomic {
                for s2 in 0..atomic {
                    rho[(s, s2)] += self.rho[(n * atomic + s, n * atomic + s2)];
                }
            }
        }
        Ok(FullState {
            n_atoms: self.n_atoms,
            n_max: None,
            rho,
        })
    }

    /// Populations of each Fock level of the cavity factor.
    pub fn fock_populations(&self) -> Result<Vec<f64>> {
        let n_max = self.n_max.ok_or_else(|| {
            Error::InvalidArgument("state has no cavity factor".into())
        })? as usize;
        let atomic = hilbert::atomic_dim(self.n_atoms);
        Ok((0..=n_max)
            .map(|n| {
                (0..atomic)
                    .map(|s| self.rho[(n * atomic + s, n * atomic + s)].re)
                    .sum()
            })
            .collect())
    }
}

/// Adequacy report for the Fock-space truncation of a cavity steady state.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffReport {
    pub fock_populations: Vec<f64>,
    pub top_population: f64,
    /// Top-of-ladder population below 1e-6.
    pub adequate: bool,
}

pub fn cavity_cutoff_report(fs: &FullState) -> Result<CutoffReport> {
    let fock_populations = fs.fock_populations()?;
    let top_population = *fock_populations.last().expect("n_max >= 2");
    Ok(CutoffReport {
        adequate: top_population <= 1e-6,
        top_population,
        fock_populations,
    })
}

/// Largest ensemble the atomic oracle will materialize.
pub const MAX_ORACLE_ATOMS: u32 = 6;
/// Largest ensemble the joint atom-cavity oracle will materialize.
pub const MAX_CAVITY_ATOMS: u32 = 4;

/// Exact generator of pumping plus collective decay on the `2^N` space.
pub fn full_atomic_liouvillian(
    n_atoms: u32,
    gamma_p: f64,
    gamma_1: f64,
    gamma_2: f64,
) -> Result<FullLiouvillian> {
    if n_atoms == 0 || n_atoms > MAX_ORACLE_ATOMS {
        return Err(Error::InvalidArgument(format!(
            "atomic oracle supports 1..={MAX_ORACLE_ATOMS} atoms, got {n_atoms}"
        )));
    }
    for (name, v) in [("gamma_p", gamma_p), ("gamma_1", gamma_1), ("gamma_2", gamma_2)] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "{name} must be a finite nonnegative rate, got {v}"
            )));
        }
    }
    let mut jumps = Vec::new();
    if gamma_p > 0.0 {
        for site in 0..n_atoms {
            jumps.push(Jump::new(gamma_p, hilbert::sigma_plus(n_atoms, site)));
        }
    }
    let lower = hilbert::collective_lowering(n_atoms);
    if gamma_1 > 0.0 {
        jumps.push(Jump::new(gamma_1, lower.clone()));
    }
    if gamma_2 > 0.0 {
        jumps.push(Jump::new(gamma_2, &lower * &lower));
    }
    Ok(FullLiouvillian {
        tag: ModelTag::AtomicOnly {
            n_atoms,
            gamma_p,
            gamma_1,
            gamma_2,
        },
        dim: hilbert::atomic_dim(n_atoms),
        hamiltonian: None,
        jumps,
    })
}

/// Exact generator of the two-excitation atom-cavity exchange
/// `H = lambda (a^dag J_-^2 + a J_+^2)` with cavity loss and pumping, on the
/// truncated joint space.
pub fn full_cavity_liouvillian(
    n_atoms: u32,
    n_max: u32,
    lambda: f64,
    kappa_a: f64,
    gamma_p: f64,
) -> Result<FullLiouvillian> {
    if n_atoms == 0 || n_atoms > MAX_CAVITY_ATOMS {
        return Err(Error::InvalidArgument(format!(
            "cavity oracle supports 1..={MAX_CAVITY_ATOMS} atoms, got {n_atoms}"
        )));
    }
    if n_max < 2 {
        return Err(Error::InvalidArgument(format!(
            "Fock cutoff must be at least 2, got {n_max}"
        )));
    }
    for (name, v) in [("lambda", lambda), ("kappa_a", kappa_a), ("gamma_p", gamma_p)] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "{name} must be a finite nonnegative rate, got {v}"
            )));
        }
    }
    let atomic = hilbert::atomic_dim(n_atoms);
    let fock = n_max as usize + 1;
    let dim = fock * atomic;
    let annihilate = hilbert::fock_annihilation(n_max);
    let lower = hilbert::collective_lowering(n_atoms);
    let lower2 = &lower * &lower;
    let raise2 = lower2.transpose();
    let hamiltonian = (hilbert::joint(&annihilate.transpose(), &lower2)
        + hilbert::joint(&annihilate, &raise2))
    .scale(lambda);

    let mut jumps = Vec::new();
    if gamma_p > 0.0 {
        let id_fock = hilbert::identity(fock);
        for site in 0..n_atoms {
            jumps.push(Jump::new(
                gamma_p,
                hilbert::joint(&id_fock, &hilbert::sigma_plus(n_atoms, site)),
            ));
        }
    }
    if kappa_a > 0.0 {
        jumps.push(Jump::new(
            kappa_a,
            hilbert::joint(&annihilate, &hilbert::identity(atomic)),
        ));
    }
    Ok(FullLiouvillian {
        tag: ModelTag::AtomCavity {
            n_atoms,
            n_max,
            lambda,
            kappa_a,
            gamma_p,
        },
        dim,
        hamiltonian: Some(hamiltonian),
        jumps,
    })
}

impl FullLiouvillian {
    pub fn tag(&self) -> &ModelTag {
        &self.tag
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Excitation count of a basis index (photons weighted twice).
    fn grade(&self, idx: usize) -> u32 {
        match self.tag.n_max() {
            None => (idx as u32).count_ones(),
            Some(_) => {
                let atomic = hilbert::atomic_dim(self.tag.n_atoms());
                let n = (idx / atomic) as u32;
                let s = (idx % atomic) as u32;
                2 * n + s.count_ones()
            }
        }
    }

    /// Apply the generator to a density matrix.
    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::<C64>::zeros(self.dim, self.dim);
        if let Some(h) = &self.hamiltonian {
            let h_c = h.map(|x| C64::new(x, 0.0));
            let comm = &h_c * rho - rho * &h_c;
            out -= comm * C64::new(0.0, 1.0);
        }
        for jump in &self.jumps {
            let gain = &jump.op_c * rho * jump.op_c.transpose();
            let loss = &jump.odo_c * rho + rho * &jump.odo_c;
            out += (gain - loss.scale(0.5)).scale(jump.rate);
        }
        out
    }

    /// |tr L(rho)|: zero for a trace-preserving generator.
    pub fn trace_defect(&self, rho: &DMatrix<C64>) -> f64 {
        self.apply(rho).trace().norm()
    }

    /// The full superoperator as a dense matrix over column-stacked density
    /// matrices (`vec index = row + col * dim`). Only for small dimensions.
    pub fn superoperator_dense(&self) -> Result<DMatrix<C64>> {
        let d = self.dim;
        if d > 24 {
            return Err(Error::InvalidArgument(format!(
                "dense superoperator limited to dimension 24, got {d}"
            )));
        }
        let mut sup = DMatrix::<C64>::zeros(d * d, d * d);
        let mut unit = DMatrix::<C64>::zeros(d, d);
        for t in 0..d {
            for t2 in 0..d {
                unit[(t, t2)] = C64::new(1.0, 0.0);
                let image = self.apply(&unit);
                unit[(t, t2)] = C64::new(0.0, 0.0);
                let col = t + t2 * d;
                for s in 0..d {
                    for s2 in 0..d {
                        sup[(s + s2 * d, col)] = image[(s, s2)];
                    }
                }
            }
        }
        Ok(sup)
    }

    /// Pairs (a, b) with equal excitation grade, their positions, and the
    /// restricted superoperator block they span.
    fn graded_block(&self) -> (Vec<(usize, usize)>, Vec<usize>, DMatrix<C64>) {
        let d = self.dim;
        let grades: Vec<u32> = (0..d).map(|i| self.grade(i)).collect();
        let mut pairs = Vec::new();
        let mut pos = vec![usize::MAX; d * d];
        for a in 0..d {
            for b in 0..d {
                if grades[a] == grades[b] {
                    pos[a * d + b] = pairs.len();
                    pairs.push((a, b));
                }
            }
        }
        let np = pairs.len();
        let mut block = DMatrix::<C64>::zeros(np, np);

        let col_entries = |m: &DMatrix<f64>| -> Vec<Vec<(usize, f64)>> {
            (0..d)
                .map(|c| {
                    (0..d)
                        .filter_map(|r| {
                            let v = m[(r, c)];
                            (v != 0.0).then_some((r, v))
                        })
                        .collect()
                })
                .collect()
        };

        for jump in &self.jumps {
            let op_cols = col_entries(&jump.op);
            let odo_cols = col_entries(&jump.odo);
            for (ci, &(t, t2)) in pairs.iter().enumerate() {
                for &(s, v1) in &op_cols[t] {
                    for &(s2, v2) in &op_cols[t2] {
                        let ri = pos[s * d + s2];
                        debug_assert_ne!(ri, usize::MAX);
                        block[(ri, ci)] += C64::new(jump.rate * v1 * v2, 0.0);
                    }
                }
                for &(s, v) in &odo_cols[t] {
                    let ri = pos[s * d + t2];
                    debug_assert_ne!(ri, usize::MAX);
                    block[(ri, ci)] -= C64::new(0.5 * jump.rate * v, 0.0);
                }
                // O^dag O is symmetric, so its column t2 is also its row t2.
                for &(s2, v) in &odo_cols[t2] {
                    let ri = pos[t * d + s2];
                    debug_assert_ne!(ri, usize::MAX);
                    block[(ri, ci)] -= C64::new(0.5 * jump.rate * v, 0.0);
                }
            }
        }

        if let Some(h) = &self.hamiltonian {
            let h_cols = col_entries(h);
            for (ci, &(t, t2)) in pairs.iter().enumerate() {
                for &(s, v) in &h_cols[t] {
                    let ri = pos[s * d + t2];
                    debug_assert_ne!(ri, usize::MAX);
                    block[(ri, ci)] += C64::new(0.0, -v);
                }
                // H is symmetric, so its column t2 doubles as its row t2.
                for &(s2, v) in &h_cols[t2] {
                    let ri = pos[t * d + s2];
                    debug_assert_ne!(ri, usize::MAX);
                    block[(ri, ci)] += C64::new(0.0, v);
                }
            }
        }

        (pairs, pos, block)
    }
}

/// Residual bound of the stationary solve, scaled by the magnitude of the
/// generator's matrix elements.
pub const FULL_RESIDUAL_TOL: f64 = 1e-10;

/// Unique stationary state of the generator via the excitation-graded block.
pub fn full_steady_state(liouvillian: &FullLiouvillian) -> Result<FullState> {
    if liouvillian.tag.gamma_p() <= 0.0 {
        return Err(Error::NonUniqueSteadyState(
            "gamma_p = 0 leaves a degenerate nullspace of dark states".into(),
        ));
    }
    let d = liouvillian.dim;
    let (pairs, pos, block) = liouvillian.graded_block();
    let scale = block.camax().max(1.0);

    let solution = if liouvillian.hamiltonian.is_none() {
        // Dissipators with real jump operators make the block real.
        let real = block.map(|z| z.re);
        let x = solve_with_trace_row_real(&real, &pairs, &pos, d)?;
        x.map(|v| C64::new(v, 0.0))
    } else {
        solve_with_trace_row_complex(&block, &pairs, &pos, d)?
    };

    let mut rho = DMatrix::<C64>::zeros(d, d);
    for (ci, &(a, b)) in pairs.iter().enumerate() {
        rho[(a, b)] = solution[ci];
    }
    // Hermitize and normalize; both are exact symmetries of the solution and
    // only clean up roundoff.
    rho = (&rho + rho.adjoint()).scale(0.5);
    let trace = rho.trace();
    if !(trace.re.is_finite() && trace.re > 0.0) {
        return Err(Error::NumericalFailure(format!(
            "stationary solve produced trace {trace}"
        )));
    }
    rho /= trace;

    let residual = liouvillian.apply(&rho).camax();
    if residual > FULL_RESIDUAL_TOL * scale {
        return Err(Error::NumericalFailure(format!(
            "stationary residual {residual:e} exceeds tolerance at scale {scale:e}"
        )));
    }

    let state = FullState {
        n_atoms: liouvillian.tag.n_atoms(),
        n_max: liouvillian.tag.n_max(),
        rho,
    };
    state.validate()?;
    Ok(state)
}

/// Stationary state from the whole dense superoperator; small dimensions
/// only. Cross-check route for [`full_steady_state`]: nothing restricts the
/// solution to the graded block here.
pub fn full_steady_state_dense(liouvillian: &FullLiouvillian) -> Result<FullState> {
    if liouvillian.tag.gamma_p() <= 0.0 {
        return Err(Error::NonUniqueSteadyState(
            "gamma_p = 0 leaves a degenerate nullspace of dark states".into(),
        ));
    }
    let d = liouvillian.dim;
    let mut sup = liouvillian.superoperator_dense()?;
    let scale = sup.camax().max(1.0);
    // Replace the row of the last diagonal pair with the trace functional.
    let row = (d - 1) + (d - 1) * d;
    for col in 0..d * d {
        sup[(row, col)] = C64::new(0.0, 0.0);
    }
    for t in 0..d {
        sup[(row, t + t * d)] = C64::new(1.0, 0.0);
    }
    let mut rhs = DVector::<C64>::zeros(d * d);
    rhs[row] = C64::new(1.0, 0.0);
    let x = sup.lu().solve(&rhs).ok_or_else(|| {
        Error::NumericalFailure("dense stationary system is singular".into())
    })?;
    let mut rho = DMatrix::<C64>::zeros(d, d);
    for s in 0..d {
        for s2 in 0..d {
            rho[(s, s2)] = x[s + s2 * d];
        }
    }
    rho = (&rho + rho.adjoint()).scale(0.5);
    rho /= rho.trace();
    let residual = liouvillian.apply(&rho).camax();
    if residual > FULL_RESIDUAL_TOL * scale {
        return Err(Error::NumericalFailure(format!(
            "dense stationary residual {residual:e} exceeds tolerance"
        )));
    }
    let state = FullState {
        n_atoms: liouvillian.tag.n_atoms(),
        n_max: liouvillian.tag.n_max(),
        rho,
    };
    state.validate()?;
    Ok(state)
}

fn solve_with_trace_row_real(
    block: &DMatrix<f64>,
    pairs: &[(usize, usize)],
    pos: &[usize],
    d: usize,
) -> Result<DVector<f64>> {
    let np = pairs.len();
    let row = pos[(d - 1) * d + (d - 1)];
    let mut system = block.clone();
    for (ci, &(t, t2)) in pairs.iter().enumerate() {
        system[(row, ci)] = if t == t2 { 1.0 } else { 0.0 };
    }
    let mut rhs = DVector::<f64>::zeros(np);
    rhs[row] = 1.0;
    system
        .lu()
        .solve(&rhs)
        .filter(|x| x.iter().all(|v| v.is_finite()))
        .ok_or_else(|| Error::NumericalFailure("graded stationary system is singular".into()))
}

fn solve_with_trace_row_complex(
    block: &DMatrix<C64>,
    pairs: &[(usize, usize)],
    pos: &[usize],
    d: usize,
) -> Result<DVector<C64>> {
    let np = pairs.len();
    let row = pos[(d - 1) * d + (d - 1)];
    let mut system = block.clone();
    for (ci, &(t, t2)) in pairs.iter().enumerate() {
        system[(row, ci)] = C64::new(if t == t2 { 1.0 } else { 0.0 }, 0.0);
    }
    let mut rhs = DVector::<C64>::zeros(np);
    rhs[row] = C64::new(1.0, 0.0);
    system
        .lu()
        .solve(&rhs)
        .filter(|x| x.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
        .ok_or_else(|| Error::NumericalFailure("graded stationary system is singular".into()))
}

/// Fixed-step fourth-order propagation of the dense density matrix; used for
/// consistency spot checks of the generators.
pub fn evolve_full(
    liouvillian: &FullLiouvillian,
    initial: &DMatrix<C64>,
    t_final: f64,
    steps: usize,
) -> DMatrix<C64> {
    let h = t_final / steps as f64;
    let mut rho = initial.clone();
    for _ in 0..steps {
        let k1 = liouvillian.apply(&rho);
        let k2 = liouvillian.apply(&(&rho + k1.scale(h / 2.0)));
        let k3 = liouvillian.apply(&(&rho + k2.scale(h / 2.0)));
        let k4 = liouvillian.apply(&(&rho + k3.scale(h)));
        rho += (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h / 6.0);
    }
    rho
}

/// Aggregated (J, M) populations of a bare-space density matrix, plus the
/// largest coherence magnitude between different (J, M) sectors.
///
/// Populations in `(-1e-8, 0)` — roundoff from an almost-positive matrix —
/// are clamped to zero before normalization.
pub fn project_to_dicke(fs: &FullState, basis: &DickeBasis) -> Result<(DiagonalState, f64)> {
    if fs.n_max.is_some() {
        return Err(Error::InvalidArgument(
            "trace out the cavity before projecting onto the ladder basis".into(),
        ));
    }
    if fs.n_atoms != basis.n_atoms() || fs.dim() != hilbert::atomic_dim(basis.n_atoms()) {
        return Err(Error::InvalidArgument(format!(
            "state dimension {} does not match the {}-atom basis",
            fs.dim(),
            basis.n_atoms()
        )));
    }
    let n_atoms = fs.n_atoms;
    let dim = fs.dim();
    let jsq = hilbert::collective_j_squared(n_atoms);

    // Eigenbasis of J^2 within each weight (fixed excitation count) block.
    struct WeightBlock {
        members: Vec<usize>,
        vectors: DMatrix<f64>,
        /// (two_j, two_m) per eigencolumn.
        sectors: Vec<(u32, i32)>,
    }
    let mut blocks = Vec::new();
    for k in 0..=n_atoms {
        let members: Vec<usize> = (0..dim).filter(|s| s.count_ones() == k).collect();
        let nb = members.len();
        let restricted = DMatrix::from_fn(nb, nb, |r, c| jsq[(members[r], members[c])]);
        let eigen = nalgebra::SymmetricEigen::new(restricted);
        let mut sectors = Vec::with_capacity(nb);
        for lambda in eigen.eigenvalues.iter() {
            let j = (-1.0 + (1.0 + 4.0 * lambda).sqrt()) / 2.0;
            let two_j = (2.0 * j).round() as i64;
            let j_round = two_j as f64 / 2.0;
            if (j_round * (j_round + 1.0) - lambda).abs() > 1e-8 || two_j < 0 {
                return Err(Error::NumericalFailure(format!(
                    "total-spin eigenvalue {lambda} is not of the form J(J+1)"
                )));
            }
            let two_m = 2 * k as i32 - n_atoms as i32;
            sectors.push((two_j as u32, two_m));
        }
        blocks.push(WeightBlock {
            members,
            vectors: eigen.eigenvectors,
            sectors,
        });
    }

    // Populations from the diagonal blocks.
    let mut p = vec![0.0; basis.n_states()];
    let mut coherence: f64 = 0.0;
    for (bi, block) in blocks.iter().enumerate() {
        let nb = block.members.len();
        let sub = DMatrix::from_fn(nb, nb, |r, c| fs.rho[(block.members[r], block.members[c])]);
        let vectors_c = block.vectors.map(|x| C64::new(x, 0.0));
        let transformed = vectors_c.adjoint() * &sub * &vectors_c;
        for i in 0..nb {
            let (two_j, two_m) = block.sectors[i];
            let idx = basis.index_of(two_j, two_m).ok_or_else(|| {
                Error::NumericalFailure(format!(
                    "sector (2J, 2M) = ({two_j}, {two_m}) not present in the basis"
                ))
            })?;
            p[idx] += transformed[(i, i)].re;
            coherence = coherence.max(transformed[(i, i)].im.abs());
            for j in 0..nb {
                if j != i && block.sectors[j] != block.sectors[i] {
                    coherence = coherence.max(transformed[(i, j)].norm());
                }
            }
        }
        // Cross-weight coherences always connect different (J, M) sectors.
        for other in blocks.iter().skip(bi + 1) {
            let mb = other.members.len();
            let cross =
                DMatrix::from_fn(nb, mb, |r, c| fs.rho[(block.members[r], other.members[c])]);
            let other_vectors = other.vectors.map(|x| C64::new(x, 0.0));
            let transformed = vectors_c.adjoint() * &cross * &other_vectors;
            coherence = coherence.max(transformed.camax());
        }
    }

    for v in &mut p {
        if *v < 0.0 {
            if *v < -EIGENVALUE_TOL {
                return Err(Error::NumericalFailure(format!(
                    "projected population {v:e} is negative beyond tolerance"
                )));
            }
            *v = 0.0;
        }
    }
    let total: f64 = p.iter().sum();
    for v in &mut p {
        *v /= total;
    }
    Ok((DiagonalState::new(basis.clone(), p)?, coherence))
}

/// Exact operator-algebra observables of an atomic density matrix, defining
/// the ground truth for the ladder-sum route. The squeezing witness is
/// evaluated from all three spin components.
pub fn full_observables(fs: &FullState) -> Result<ObservableSet> {
    if fs.n_max.is_some() {
        return Err(Error::InvalidArgument(
            "trace out the cavity before computing atomic observables".into(),
        ));
    }
    let n_atoms = fs.n_atoms;
    let n = n_atoms as f64;
    let rho = &fs.rho;

    let lower = hilbert::collective_lowering(n_atoms);
    let raise = lower.transpose();
    let lower2 = &lower * &lower;
    let raise2 = lower2.transpose();
    let lower4 = &lower2 * &lower2;
    let raise4 = lower4.transpose();
    let jz = hilbert::collective_jz(n_atoms);
    let jsq_op = hilbert::collective_j_squared(n_atoms);

    let expect_real = |op: &DMatrix<f64>| -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..rho.nrows() {
            for j in 0..rho.ncols() {
                if op[(i, j)] != 0.0 {
                    acc += op[(i, j)] * rho[(j, i)];
                }
            }
        }
        acc.re
    };

    let jpjm = expect_real(&(&raise * &lower));
    let jp2jm2 = expect_real(&(&raise2 * &lower2));
    let jp4jm4 = expect_real(&(&raise4 * &lower4));
    let jz_val = expect_real(&jz);
    let jz2 = expect_real(&(&jz * &jz));
    let jsq = expect_real(&jsq_op);
    let sum_pop = expect_real(&hilbert::total_population(n_atoms));

    // Transverse components for the full squeezing witness.
    let jx = (&raise + &lower).scale(0.5);
    let jx_val = expect_real(&jx);
    let jx2 = expect_real(&(&jx * &jx));
    // J_y^2 = -(J_+ - J_-)^2 / 4 is real; <J_y> needs complex arithmetic.
    let jy2_op = (&raise - &lower) * (&raise - &lower) * (-0.25);
    let jy2 = expect_real(&jy2_op);
    let jy_val = {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..rho.nrows() {
            for j in 0..rho.ncols() {
                let v = raise[(i, j)] - lower[(i, j)];
                if v != 0.0 {
                    acc += C64::new(0.0, -0.5) * v * rho[(j, i)];
                }
            }
        }
        acc.re
    };

    let xi2 = 2.0
        * ((jx2 - jx_val * jx_val) + (jy2 - jy_val * jy_val) + (jz2 - jz_val * jz_val))
        / n;

    let g2_1 = (jpjm > 0.0).then(|| jp2jm2 / (jpjm * jpjm));
    let g2_2 = (jp2jm2 > 0.0).then(|| jp4jm4 / (jp2jm2 * jp2jm2));

    Ok(ObservableSet {
        jpjm,
        jp2jm2,
        jp4jm4,
        jz: jz_val,
        jz2,
        jsq,
        sum_pop,
        r_f: (jpjm - sum_pop) / n,
        sigma_z: 2.0 * jz_val / n,
        xi2,
        g2_1,
        g2_2,
    })
}
