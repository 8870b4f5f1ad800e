//! Hamiltonians from integral files and built-in models, plus closed-form
//! reference states.
//!
//! The electronic Hamiltonian is assembled in second quantization from a
//! one-body matrix `T` and two-body integrals in chemists' notation `(pq|rs)`:
//!
//! ```text
//! H = sum_{ij,s} T_ij c+_{is} c_{js}
//!   + 1/2 sum_{pqrs,st} (pq|rs) c+_{ps} c+_{rt} c_{st'} c_{qs'}   (t',s' = t,s)
//! ```
//!
//! so a site-diagonal integral `(ii|ii) = U` produces the familiar
//! `U n_up n_down` Hubbard repulsion, which is pinned by a unit test.

mod analytic;
mod fcidump;
mod hubbard;

pub use analytic::{analytic_state, AnalyticState};
pub use fcidump::{parse_fcidump, parse_fcidump_str, write_fcidump};
pub use hubbard::{
    hubbard_dimer_coefficients, hubbard_hamiltonian, hubbard_integral_set,
    HubbardDimerCoefficients, HubbardParams,
};

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{CoreError, Result};
use crate::fock::{apply_annihilation, apply_creation, FockBasis, LadderOutcome, OccupationConfig};
use crate::C64;

/// Symmetry tolerance enforced on integral tensors.
pub const INTEGRAL_SYM_TOL: f64 = 1e-12;

/// One- and two-body integrals of an active space in chemists' notation.
///
/// `two_body` stores `(ij|kl)` under the full 8-fold index symmetry
/// `(ij|kl) = (ji|kl) = (ij|lk) = (ji|lk) = (kl|ij) = ...`; the accessor
/// canonicalizes indices, so all eight images always agree exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralSet {
    orbital_count: usize,
    one_body: DMatrix<f64>,
    two_body: HashMap<(u16, u16, u16, u16), f64>,
    core_energy: f64,
    electron_count: u32,
    ms2: i32,
    /// Orbital symmetry labels from the source file, stored as metadata only.
    orbsym: Vec<u32>,
}

impl IntegralSet {
    /// Build an integral set, validating the one-body symmetry.
    pub fn new(
        orbital_count: usize,
        one_body: DMatrix<f64>,
        electron_count: u32,
        ms2: i32,
    ) -> Result<Self> {
        if one_body.nrows() != orbital_count || one_body.ncols() != orbital_count {
            return Err(CoreError::DimensionMismatch(format!(
                "one-body matrix is {}x{}, expected {orbital_count}x{orbital_count}",
                one_body.nrows(),
                one_body.ncols()
            )));
        }
        for i in 0..orbital_count {
            for j in 0..i {
                if (one_body[(i, j)] - one_body[(j, i)]).abs() > INTEGRAL_SYM_TOL {
                    return Err(CoreError::InvalidInput(format!(
                        "one-body integrals not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(IntegralSet {
            orbital_count,
            one_body,
            two_body: HashMap::new(),
            core_energy: 0.0,
            electron_count,
            ms2,
            orbsym: Vec::new(),
        })
    }

    /// Empty integral set (all integrals zero).
    pub fn zero(orbital_count: usize, electron_count: u32, ms2: i32) -> Self {
        IntegralSet {
            orbital_count,
            one_body: DMatrix::zeros(orbital_count, orbital_count),
            two_body: HashMap::new(),
            core_energy: 0.0,
            electron_count,
            ms2,
            orbsym: Vec::new(),
        }
    }

    pub fn orbital_count(&self) -> usize {
        self.orbital_count
    }

    pub fn electron_count(&self) -> u32 {
        self.electron_count
    }

    pub fn ms2(&self) -> i32 {
        self.ms2
    }

    pub fn core_energy(&self) -> f64 {
        self.core_energy
    }

    pub fn set_core_energy(&mut self, e: f64) {
        self.core_energy = e;
    }

    pub fn orbsym(&self) -> &[u32] {
        &self.orbsym
    }

    pub fn set_orbsym(&mut self, labels: Vec<u32>) {
        self.orbsym = labels;
    }

    /// One-body integral `T_ij` (0-based orbital indices).
    pub fn t(&self, i: usize, j: usize) -> f64 {
        self.one_body[(i, j)]
    }

    /// Set `T_ij = T_ji = value`.
    pub fn set_t(&mut self, i: usize, j: usize, value: f64) {
        self.one_body[(i, j)] = value;
        self.one_body[(j, i)] = value;
    }

    pub fn one_body(&self) -> &DMatrix<f64> {
        &self.one_body
    }

    /// Two-body integral `(ij|kl)` in chemists' notation (0-based indices).
    pub fn v(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.two_body
            .get(&canonical_chemist(i, j, k, l))
            .copied()
            .unwrap_or(0.0)
    }

    /// Set `(ij|kl)` and all eight symmetry images.
    pub fn set_v(&mut self, i: usize, j: usize, k: usize, l: usize, value: f64) {
        self.two_body.insert(canonical_chemist(i, j, k, l), value);
    }

    /// Nonzero two-body entries expanded over all distinct index images.
    pub fn two_body_expanded(&self) -> Vec<(usize, usize, usize, usize, f64)> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for (&(i, j, k, l), &value) in &self.two_body {
            if value == 0.0 {
                continue;
            }
            let (i, j, k, l) = (i as usize, j as usize, k as usize, l as usize);
            for &(p, q, r, s) in &[
                (i, j, k, l),
                (j, i, k, l),
                (i, j, l, k),
                (j, i, l, k),
                (k, l, i, j),
                (l, k, i, j),
                (k, l, j, i),
                (l, k, j, i),
            ] {
                if seen.insert((p, q, r, s)) {
                    out.push((p, q, r, s, value));
                }
            }
        }
        out.sort_unstable_by_key(|&(p, q, r, s, _)| (p, q, r, s));
        out
    }

    /// Drop every two-body integral (used by the noninteracting analysis).
    pub fn without_interaction(&self) -> Self {
        let mut copy = self.clone();
        copy.two_body.clear();
        copy
    }
}

/// Canonical representative of the 8 chemists'-notation index images.
fn canonical_chemist(i: usize, j: usize, k: usize, l: usize) -> (u16, u16, u16, u16) {
    let pair = |a: usize, b: usize| if a >= b { (a, b) } else { (b, a) };
    let (i, j) = pair(i, j);
    let (k, l) = pair(k, l);
    let left = i * (i + 1) / 2 + j;
    let right = k * (k + 1) / 2 + l;
    let ((a, b), (c, d)) = if left >= right {
        ((i, j), (k, l))
    } else {
        ((k, l), (i, j))
    };
    (a as u16, b as u16, c as u16, d as u16)
}

/// A sparse Hermitian operator on a sector-restricted Fock basis,
/// stored as `(row, col, value)` triples.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    basis: Arc<FockBasis>,
    entries: Vec<(usize, usize, C64)>,
}

impl SparseOperator {
    /// Assemble from an accumulation map, dropping negligible entries and
    /// sorting for deterministic iteration.
    fn from_map(basis: Arc<FockBasis>, map: HashMap<(usize, usize), C64>) -> Self {
        let mut entries: Vec<(usize, usize, C64)> = map
            .into_iter()
            .filter(|(_, v)| v.norm() > 1e-15)
            .map(|((r, c), v)| (r, c, v))
            .collect();
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        SparseOperator { basis, entries }
    }

    /// The zero operator.
    pub fn zero(basis: Arc<FockBasis>) -> Self {
        SparseOperator {
            basis,
            entries: Vec::new(),
        }
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    /// Largest entry magnitude; scale reference for residual tolerances.
    pub fn max_entry(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(_, _, v)| v.norm())
            .fold(0.0, f64::max)
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &DVector<C64>) -> DVector<C64> {
        let mut y = DVector::zeros(self.dim());
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    /// Largest deviation from Hermiticity.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut map: HashMap<(usize, usize), C64> = HashMap::new();
        for &(r, c, v) in &self.entries {
            *map.entry((r, c)).or_insert_with(|| C64::new(0.0, 0.0)) += v;
        }
        let mut dev: f64 = 0.0;
        for (&(r, c), &v) in &map {
            let vt = map.get(&(c, r)).copied().unwrap_or_else(|| C64::new(0.0, 0.0));
            dev = dev.max((v - vt.conj()).norm());
        }
        dev
    }

    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        let dev = self.hermiticity_deviation();
        if dev > tol {
            Err(CoreError::NotHermitian { max_deviation: dev })
        } else {
            Ok(())
        }
    }

    #[cfg(test)]
    pub(crate) fn push_raw_entry_for_tests(&mut self, row: usize, col: usize, value: C64) {
        self.entries.push((row, col, value));
    }
}

/// Accumulator for operator assembly by signed ladder-operator application.
struct OperatorBuilder<'a> {
    basis: &'a FockBasis,
    map: HashMap<(usize, usize), C64>,
}

impl<'a> OperatorBuilder<'a> {
    fn new(basis: &'a FockBasis) -> Self {
        OperatorBuilder {
            basis,
            map: HashMap::new(),
        }
    }

    /// Add `coeff * (operator string)` applied to basis column `col`.
    /// The string is given right-to-left: `ops[0]` acts first.
    fn add_string(
        &mut self,
        col: usize,
        coeff: f64,
        ops: &[(LadderKind, usize)],
    ) -> Result<()> {
        let mut config = self.basis.config(col);
        let mut phase = 1i32;
        for &(kind, mode) in ops {
            let outcome = match kind {
                LadderKind::Create => apply_creation(config, mode)?,
                LadderKind::Annihilate => apply_annihilation(config, mode)?,
            };
            match outcome {
                LadderOutcome::Annihilated => return Ok(()),
                LadderOutcome::Mapped { config: c, phase: p } => {
                    config = c;
                    phase *= p as i32;
                }
            }
        }
        // Strings that leave the sector contribute nothing within it; the
        // builder is only used for sector-commuting Hamiltonians, so a miss
        // here would indicate a symmetry-breaking term.
        if let Some(row) = self.basis.index_of(&config) {
            *self
                .map
                .entry((row, col))
                .or_insert_with(|| C64::new(0.0, 0.0)) += C64::new(coeff * phase as f64, 0.0);
        }
        Ok(())
    }

    fn finish(self, basis: Arc<FockBasis>) -> SparseOperator {
        SparseOperator::from_map(basis, self.map)
    }
}

#[derive(Clone, Copy)]
enum LadderKind {
    Create,
    Annihilate,
}

/// Assemble the electronic Hamiltonian of `ints` on `basis`.
///
/// The basis must span `2 * orbital_count` spin-orbital modes. The core
/// energy is added to the diagonal.
pub fn build_hamiltonian(ints: &IntegralSet, basis: &Arc<FockBasis>) -> Result<SparseOperator> {
    let d = ints.orbital_count();
    if basis.mode_count() != 2 * d {
        return Err(CoreError::DimensionMismatch(format!(
            "basis has {} modes, integrals require {}",
            basis.mode_count(),
            2 * d
        )));
    }

    let mut builder = OperatorBuilder::new(basis);
    let two_body = ints.two_body_expanded();

    for col in 0..basis.dim() {
        if ints.core_energy() != 0.0 {
            builder.add_string(col, ints.core_energy(), &[])?;
        }
        // Spin-restricted one-body part: same T for both spins.
        for i in 0..d {
            for j in 0..d {
                let t = ints.t(i, j);
                if t == 0.0 {
                    continue;
                }
                for spin in 0..2 {
                    builder.add_string(
                        col,
                        t,
                        &[
                            (LadderKind::Annihilate, 2 * j + spin),
                            (LadderKind::Create, 2 * i + spin),
                        ],
                    )?;
                }
            }
        }
        // Two-body part: 1/2 (pq|rs) c+_{ps} c+_{rt} c_{st} c_{qs}.
        for &(p, q, r, s, v) in &two_body {
            for sigma in 0..2 {
                for tau in 0..2 {
                    builder.add_string(
                        col,
                        0.5 * v,
                        &[
                            (LadderKind::Annihilate, 2 * q + sigma),
                            (LadderKind::Annihilate, 2 * s + tau),
                            (LadderKind::Create, 2 * r + tau),
                            (LadderKind::Create, 2 * p + sigma),
                        ],
                    )?;
                }
            }
        }
    }

    let op = builder.finish(Arc::clone(basis));
    op.check_hermitian(1e-12)?;
    Ok(op)
}

/// Expectation value `<state| op |state>`.
pub fn expectation(op: &SparseOperator, state: &crate::fock::StateVector) -> C64 {
    state.amplitudes().dotc(&op.matvec(state.amplitudes()))
}

/// Apply a number-conserving one-body operator string `c+_n c_m` to a state.
///
/// Returns the matrix `<x'|c+_n c_m|x>` contraction as a new amplitude vector
/// over the same basis; used by the one-particle RDM.
pub(crate) fn apply_hopping(
    state: &crate::fock::StateVector,
    create: usize,
    annihilate: usize,
) -> Result<DVector<C64>> {
    let basis = state.basis();
    let mut out = DVector::<C64>::zeros(basis.dim());
    for (idx, config) in basis.configs().iter().enumerate() {
        let amp = state.amplitude(idx);
        if amp.norm() == 0.0 {
            continue;
        }
        let LadderOutcome::Mapped { config: c1, phase: p1 } =
            apply_annihilation(*config, annihilate)?
        else {
            continue;
        };
        let LadderOutcome::Mapped { config: c2, phase: p2 } = apply_creation(c1, create)? else {
            continue;
        };
        if let Some(row) = basis.index_of(&c2) {
            out[row] += amp * C64::new((p1 * p2) as f64, 0.0);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::SectorLabel;
    use approx::assert_relative_eq;

    #[test]
    fn zero_integrals_give_zero_operator() {
        let ints = IntegralSet::zero(2, 2, 0);
        let basis = Arc::new(FockBasis::enumerate(4, SectorLabel::with_n_ms2(2, 0)).unwrap());
        let h = build_hamiltonian(&ints, &basis).unwrap();
        assert!(h.entries().is_empty());
    }

    #[test]
    fn eight_fold_symmetry_images_agree() {
        let mut ints = IntegralSet::zero(3, 2, 0);
        ints.set_v(0, 1, 1, 2, 0.37);
        for &(i, j, k, l) in &[
            (0, 1, 1, 2),
            (1, 0, 1, 2),
            (0, 1, 2, 1),
            (1, 0, 2, 1),
            (1, 2, 0, 1),
            (2, 1, 0, 1),
            (1, 2, 1, 0),
            (2, 1, 1, 0),
        ] {
            assert_eq!(ints.v(i, j, k, l), 0.37);
        }
    }

    #[test]
    fn single_hopping_term_has_analytic_spectrum() {
        // T_12 = -t with one electron: a 2x2 hopping matrix per spin with
        // eigenvalues -t and +t (hand diagonalization of [[0,-t],[-t,0]]).
        let t = 0.7;
        let mut ints = IntegralSet::zero(2, 1, 1);
        ints.set_t(0, 1, -t);
        let basis = Arc::new(FockBasis::enumerate(4, SectorLabel::with_n_ms2(1, 1)).unwrap());
        let h = build_hamiltonian(&ints, &basis).unwrap();
        let dense = h.to_dense();
        assert_eq!(dense.nrows(), 2);
        let eig = dense.map(|z| z.re).symmetric_eigen();
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        assert_relative_eq!(vals[0], -t, epsilon = 1e-12);
        assert_relative_eq!(vals[1], t, epsilon = 1e-12);
    }

    #[test]
    fn double_occupation_diagonal_carries_u() {
        // (ii|ii) = U puts +U on a doubly occupied site.
        let u = 3.1;
        let mut ints = IntegralSet::zero(1, 2, 0);
        ints.set_v(0, 0, 0, 0, u);
        let basis = Arc::new(FockBasis::enumerate(2, SectorLabel::with_n_ms2(2, 0)).unwrap());
        let h = build_hamiltonian(&ints, &basis).unwrap();
        let dense = h.to_dense();
        assert_eq!(dense.nrows(), 1);
        assert_relative_eq!(dense[(0, 0)].re, u, epsilon = 1e-12);
    }

    #[test]
    fn hamiltonian_commutes_with_number_and_spin() {
        // Assemble on the unconstrained 2-orbital space and verify no matrix
        // element connects different (N, 2M) sectors.
        let mut ints = IntegralSet::zero(2, 2, 0);
        ints.set_t(0, 0, -0.3);
        ints.set_t(0, 1, -0.9);
        ints.set_v(0, 0, 0, 0, 2.0);
        ints.set_v(1, 1, 1, 1, 2.0);
        ints.set_v(0, 0, 1, 1, 0.5);
        let basis = Arc::new(FockBasis::unconstrained(4).unwrap());
        let h = build_hamiltonian(&ints, &basis).unwrap();
        for &(r, c, v) in h.entries() {
            let (cr, cc) = (basis.config(r), basis.config(c));
            assert!(
                cr.particle_count() == cc.particle_count() && cr.ms2() == cc.ms2(),
                "symmetry-violating element at ({r},{c}) = {v}"
            );
        }
    }
}
