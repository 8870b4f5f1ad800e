//! Exact ground states of sector-restricted Hamiltonians.
//!
//! Small problems go through a dense Hermitian eigendecomposition; above
//! [`DENSE_CUTOFF`] a restarted Lanczos iteration with full
//! reorthogonalization takes over, touching the operator only through
//! matrix-vector products. Both paths agree to high precision, which is
//! pinned by a test that forces the iterative path on a dense-sized sector.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, Result};
use crate::fock::StateVector;
use crate::models::SparseOperator;
use crate::C64;

/// Largest dimension solved densely.
pub const DENSE_CUTOFF: usize = 4096;

/// Spectral gap below which the ground space is flagged as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;

/// Fixed seed of the deterministic Lanczos start vector.
const LANCZOS_SEED: u64 = 0x5EED;

/// Lanczos block size and restart cap.
const KRYLOV_DIM: usize = 64;
const MAX_RESTARTS: usize = 400;

/// Ground-state eigenpair of a sector-restricted operator.
#[derive(Debug, Clone)]
pub struct EigenResult {
    /// Lowest eigenvalue within the sector.
    pub energy: f64,
    /// Normalized eigenvector, phase-fixed deterministically.
    pub state: StateVector,
    /// Set when the gap to the next eigenvalue is below [`DEGENERACY_GAP`];
    /// downstream correlation values are then convention-dependent.
    pub degeneracy_flag: bool,
    /// Final residual `|(H - E) v|`.
    pub residual: f64,
}

/// Solver selection for [`ground_state_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    /// Dense below [`DENSE_CUTOFF`], iterative above.
    Auto,
    Dense,
    Iterative,
}

/// Lowest eigenpair of `h` on its own (sector-restricted) basis.
pub fn ground_state(h: &SparseOperator) -> Result<EigenResult> {
    ground_state_with(h, SolverKind::Auto)
}

/// Lowest eigenpair with an explicit solver choice.
pub fn ground_state_with(h: &SparseOperator, solver: SolverKind) -> Result<EigenResult> {
    let dim = h.dim();
    if dim == 0 {
        return Err(CoreError::EmptySector("operator on empty basis".into()));
    }
    let scale = h.max_entry().max(1.0);
    h.check_hermitian(1e-10 * scale)?;

    let (energy, gap, vector, residual) = match solver {
        SolverKind::Dense => dense_lowest(h),
        SolverKind::Iterative => lanczos_lowest(h)?,
        SolverKind::Auto => {
            if dim <= DENSE_CUTOFF {
                dense_lowest(h)
            } else {
                lanczos_lowest(h)?
            }
        }
    };

    let state = StateVector::new(h.basis().clone(), vector)?.fix_phase_largest();
    Ok(EigenResult {
        energy,
        state,
        degeneracy_flag: gap < DEGENERACY_GAP,
        residual,
    })
}

/// Dense Hermitian eigendecomposition; returns (e0, gap, v0, residual).
fn dense_lowest(h: &SparseOperator) -> (f64, f64, DVector<C64>, f64) {
    let dense = h.to_dense();
    let eig = dense.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let e0 = eig.eigenvalues[order[0]];
    let gap = if order.len() > 1 {
        eig.eigenvalues[order[1]] - e0
    } else {
        f64::INFINITY
    };

    // Within a numerically degenerate ground space, pick the eigenvector
    // whose largest-magnitude amplitude sits at the smallest basis index;
    // keeps degenerate results deterministic across runs.
    let mut best_col = order[0];
    let mut best_key = usize::MAX;
    for &col in &order {
        if eig.eigenvalues[col] - e0 > DEGENERACY_GAP {
            break;
        }
        let v = eig.eigenvectors.column(col);
        let mut peak = 0usize;
        for i in 1..v.len() {
            if v[i].norm() > v[peak].norm() + 1e-12 {
                peak = i;
            }
        }
        if peak < best_key {
            best_key = peak;
            best_col = col;
        }
    }

    let v0: DVector<C64> = eig.eigenvectors.column(best_col).into_owned();
    let e_best = eig.eigenvalues[best_col];
    let residual = (h.matvec(&v0) - &v0 * C64::new(e_best, 0.0)).norm();
    (e_best, gap, v0, residual)
}

/// Restarted Lanczos with full reorthogonalization; returns
/// (e0, gap, v0, residual) or a non-convergence error carrying the best
/// residual reached.
fn lanczos_lowest(h: &SparseOperator) -> Result<(f64, f64, DVector<C64>, f64)> {
    let dim = h.dim();
    let tol = 1e-9 * h.max_entry().max(1.0) * dim as f64;
    let m = KRYLOV_DIM.min(dim);

    let mut rng = ChaCha8Rng::seed_from_u64(LANCZOS_SEED);
    let mut v: DVector<C64> = DVector::from_fn(dim, |_, _| {
        C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    v /= C64::new(v.norm(), 0.0);

    let mut best_residual = f64::INFINITY;
    let mut best: Option<(f64, f64, DVector<C64>)> = None;

    for _ in 0..MAX_RESTARTS {
        let (ritz_vals, ritz_vecs, basis) = lanczos_sweep(h, &v, m);
        let e0 = ritz_vals[0];
        let gap = if ritz_vals.len() > 1 {
            ritz_vals[1] - e0
        } else {
            f64::INFINITY
        };

        // Assemble the lowest Ritz vector in the original space.
        let mut v0 = DVector::<C64>::zeros(dim);
        for (j, col) in basis.iter().enumerate() {
            v0 += col * C64::new(ritz_vecs[(j, 0)], 0.0);
        }
        v0 /= C64::new(v0.norm(), 0.0);

        let residual = (h.matvec(&v0) - &v0 * C64::new(e0, 0.0)).norm();
        if residual < best_residual {
            best_residual = residual;
            best = Some((e0, gap, v0.clone()));
        }
        if residual <= tol {
            let (e0, gap, v0) = best.unwrap();
            return Ok((e0, gap, v0, best_residual));
        }
        v = v0;
    }

    Err(CoreError::EigenNonConvergence {
        iterations: MAX_RESTARTS,
        best_residual,
    })
}

/// One Lanczos pass of `m` steps from start vector `v`; returns sorted Ritz
/// values, Ritz coefficient vectors and the orthonormal Krylov basis.
fn lanczos_sweep(
    h: &SparseOperator,
    start: &DVector<C64>,
    m: usize,
) -> (Vec<f64>, DMatrix<f64>, Vec<DVector<C64>>) {
    let mut alphas: Vec<f64> = Vec::with_capacity(m);
    let mut betas: Vec<f64> = Vec::with_capacity(m);
    let mut basis: Vec<DVector<C64>> = Vec::with_capacity(m);

    let mut v = start.clone();
    v /= C64::new(v.norm(), 0.0);
    basis.push(v.clone());

    for j in 0..m {
        let mut w = h.matvec(&basis[j]);
        if j > 0 {
            w -= &basis[j - 1] * C64::new(betas[j - 1], 0.0);
        }
        let a = basis[j].dotc(&w).re;
        alphas.push(a);
        w -= &basis[j] * C64::new(a, 0.0);
        // Full reorthogonalization: twice-is-enough Gram-Schmidt.
        for _ in 0..2 {
            for q in &basis {
                let proj = q.dotc(&w);
                w -= q * proj;
            }
        }
        let b = w.norm();
        if b < 1e-13 {
            break;
        }
        betas.push(b);
        basis.push(w / C64::new(b, 0.0));
        if basis.len() == m {
            break;
        }
    }

    let k = alphas.len();
    let mut tri = DMatrix::<f64>::zeros(k, k);
    for j in 0..k {
        tri[(j, j)] = alphas[j];
        if j + 1 < k && j < betas.len() {
            tri[(j, j + 1)] = betas[j];
            tri[(j + 1, j)] = betas[j];
        }
    }
    let eig = tri.symmetric_eigen();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = DMatrix::<f64>::zeros(k, k);
    for (new_col, &old_col) in order.iter().enumerate() {
        vecs.set_column(new_col, &eig.eigenvectors.column(old_col));
    }
    basis.truncate(k);
    (vals, vecs, basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{FockBasis, SectorLabel};
    use crate::models::{hubbard_hamiltonian, HubbardParams};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn dimer_h(t: f64, u: f64) -> SparseOperator {
        let params = HubbardParams::dimer(t, u).unwrap();
        let basis = Arc::new(FockBasis::enumerate(4, SectorLabel::with_n_ms2(2, 0)).unwrap());
        hubbard_hamiltonian(&params, &basis).unwrap()
    }

    #[test]
    fn dimer_ground_energy_is_closed_form() {
        // E0 = U/2 - sqrt(U^2/4 + 4 t^2); for t=1, U=4 that is 2 - sqrt(8).
        let h = dimer_h(1.0, 4.0);
        let res = ground_state(&h).unwrap();
        assert_relative_eq!(res.energy, 2.0 - 8.0_f64.sqrt(), epsilon = 1e-10);
        assert!(!res.degeneracy_flag);
        assert!(res.residual < 1e-9 * h.max_entry() * h.dim() as f64);
    }

    #[test]
    fn noninteracting_dimer_fills_the_bonding_level() {
        let h = dimer_h(1.0, 0.0);
        let res = ground_state(&h).unwrap();
        assert_relative_eq!(res.energy, -2.0, epsilon = 1e-10);
    }

    #[test]
    fn zero_operator_is_degenerate_at_zero() {
        let basis = Arc::new(FockBasis::enumerate(4, SectorLabel::with_n_ms2(2, 0)).unwrap());
        let h = SparseOperator::zero(basis);
        let res = ground_state(&h).unwrap();
        assert_relative_eq!(res.energy, 0.0, epsilon = 1e-14);
        assert!(res.degeneracy_flag);
    }

    #[test]
    fn returned_state_is_normalized_and_in_sector() {
        let h = dimer_h(0.7, 2.3);
        let res = ground_state(&h).unwrap();
        assert_relative_eq!(res.state.amplitudes().norm(), 1.0, epsilon = 1e-12);
        for c in res.state.basis().configs() {
            assert_eq!(c.particle_count(), 2);
            assert_eq!(c.ms2(), 0);
        }
    }

    #[test]
    fn dense_and_iterative_paths_agree() {
        // 4-site chain at half filling: dimension 36, well below the dense
        // cutoff, so the iterative path is forced explicitly.
        let params = HubbardParams::new(1.0, 4.0, 4).unwrap();
        let basis = Arc::new(FockBasis::enumerate(8, SectorLabel::with_n_ms2(4, 0)).unwrap());
        let h = hubbard_hamiltonian(&params, &basis).unwrap();
        let dense = ground_state_with(&h, SolverKind::Dense).unwrap();
        let iter = ground_state_with(&h, SolverKind::Iterative).unwrap();
        assert_relative_eq!(dense.energy, iter.energy, epsilon = 1e-8);
        let overlap = dense.state.inner(&iter.state).norm();
        assert!(overlap > 1.0 - 1e-8, "overlap {overlap}");
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let basis = Arc::new(FockBasis::enumerate(4, SectorLabel::with_n_ms2(1, 1)).unwrap());
        let mut h = SparseOperator::zero(basis);
        // Inject an asymmetric entry through the test-only accessor.
        h.push_raw_entry_for_tests(0, 1, C64::new(1.0, 0.0));
        assert!(matches!(
            ground_state(&h),
            Err(CoreError::NotHermitian { .. })
        ));
    }
}
