//! Mode partial traces, orbital reduced density matrices, the one-particle
//! RDM and the intrinsic correlation measure.
//!
//! Tracing out spin-orbital modes of a fermionic state is done in two steps:
//! the kept modes are permuted to the front of the global mode order, picking
//! up the fermionic transposition sign on every configuration, and the
//! trailing tensor factor is then traced like an ordinary qudit. All sign
//! logic of the crate's reduction path lives in [`permutation_sign`].

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{CoreError, Result};
use crate::fock::{FockBasis, OccupationConfig, StateVector};
use crate::ssr::{Bipartition, SectorMask, SsrMode};
use crate::C64;

/// Hermiticity / trace tolerance of validated density matrices.
pub const DM_TOL: f64 = 1e-10;

/// Eigenvalues in `[-DM_TOL, 0)` are clipped to zero before entropies.
pub const EIG_CLIP: f64 = 1e-10;

/// Off-diagonal / sector leakage above this is a hard error.
pub const SECTOR_LEAK_TOL: f64 = 1e-8;

/// Largest kept-mode count for reductions (the reduced space is dense).
const MAX_KEPT_MODES: usize = 12;

/// A validated Hermitian, trace-one operator on the Fock space of a mode
/// subset, with optional sector-mask metadata.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    basis: Arc<FockBasis>,
    matrix: DMatrix<C64>,
    mask: Option<SectorMask>,
}

impl DensityMatrix {
    /// Validate and wrap a matrix: Hermitian and unit trace within
    /// [`DM_TOL`], eigenvalues above `-DM_TOL`.
    pub fn new(basis: Arc<FockBasis>, matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != basis.dim() || matrix.ncols() != basis.dim() {
            return Err(CoreError::DimensionMismatch(format!(
                "matrix is {}x{}, basis dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                basis.dim()
            )));
        }
        let mut herm_dev: f64 = 0.0;
        for r in 0..matrix.nrows() {
            for c in 0..=r {
                herm_dev = herm_dev.max((matrix[(r, c)] - matrix[(c, r)].conj()).norm());
            }
        }
        if herm_dev > DM_TOL {
            return Err(CoreError::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {herm_dev:.3e})"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > DM_TOL || trace.im.abs() > DM_TOL {
            return Err(CoreError::InvalidDensityMatrix(format!(
                "trace is {trace}, expected 1"
            )));
        }
        let min_eig = matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -DM_TOL {
            return Err(CoreError::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(DensityMatrix {
            basis,
            matrix,
            mask: None,
        })
    }

    /// Pure-state projector `|psi><psi|` on the state's own basis.
    pub fn pure(state: &StateVector) -> Result<Self> {
        let amps = state.amplitudes();
        let matrix = amps * amps.adjoint();
        DensityMatrix::new(state.basis().clone(), matrix)
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn mask(&self) -> Option<&SectorMask> {
        self.mask.as_ref()
    }

    pub fn with_mask(mut self, mask: SectorMask) -> Self {
        self.mask = Some(mask);
        self
    }

    pub(crate) fn replace_matrix(&self, matrix: DMatrix<C64>) -> Result<Self> {
        let mut out = DensityMatrix::new(self.basis.clone(), matrix)?;
        out.mask = self.mask.clone();
        Ok(out)
    }

    /// Eigenvalues clipped to `[0, 1]` and renormalized; the spectrum used
    /// by every entropy in the crate.
    pub fn clipped_spectrum(&self) -> Vec<f64> {
        let eig = self.matrix.clone().symmetric_eigen();
        clip_spectrum(eig.eigenvalues.as_slice())
    }
}

/// Clip tiny negative eigenvalues to zero and renormalize to unit sum.
pub fn clip_spectrum(raw: &[f64]) -> Vec<f64> {
    let clipped: Vec<f64> = raw.iter().map(|&x| if x < 0.0 { 0.0 } else { x }).collect();
    let sum: f64 = clipped.iter().sum();
    if sum > 0.0 {
        clipped.iter().map(|x| x / sum).collect()
    } else {
        clipped
    }
}

/// Sign of permuting the occupied modes of `config` from ascending global
/// order into (kept order as given, then traced ascending).
fn permutation_sign(config: &OccupationConfig, new_position: &[usize]) -> i8 {
    // Collect the new positions of the occupied modes, in original order,
    // and count inversions.
    let mut positions = Vec::with_capacity(config.particle_count() as usize);
    for m in 0..config.mode_count() {
        if config.occupied(m) {
            positions.push(new_position[m]);
        }
    }
    let mut inversions = 0usize;
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            if positions[i] > positions[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Resolve a kept-mode selection against a basis: returns the traced modes
/// and the map from global mode index to its post-permutation position.
fn resolve_kept(basis: &FockBasis, kept: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let d = basis.mode_count();
    let mut seen = vec![false; d];
    for &m in kept {
        if m >= d {
            return Err(CoreError::ModeOutOfRange {
                mode: m,
                mode_count: d,
            });
        }
        if seen[m] {
            return Err(CoreError::InvalidInput(format!("duplicate kept mode {m}")));
        }
        seen[m] = true;
    }
    if kept.len() > MAX_KEPT_MODES {
        return Err(CoreError::InvalidInput(format!(
            "cannot keep {} modes (limit {MAX_KEPT_MODES})",
            kept.len()
        )));
    }
    let traced: Vec<usize> = (0..d).filter(|&m| !seen[m]).collect();
    let mut new_position = vec![0usize; d];
    for (pos, &m) in kept.iter().chain(traced.iter()).enumerate() {
        new_position[m] = pos;
    }
    Ok((traced, new_position))
}

/// Split a global configuration into (kept-pattern, traced-pattern, sign).
fn split_config(
    config: &OccupationConfig,
    kept: &[usize],
    traced: &[usize],
    new_position: &[usize],
) -> (u64, u64, i8) {
    let mut a = 0u64;
    for (pos, &m) in kept.iter().enumerate() {
        if config.occupied(m) {
            a |= 1u64 << pos;
        }
    }
    let mut b = 0u64;
    for (pos, &m) in traced.iter().enumerate() {
        if config.occupied(m) {
            b |= 1u64 << pos;
        }
    }
    (a, b, permutation_sign(config, new_position))
}

/// Reduced density matrix of a pure state on the Fock space of `kept_modes`.
///
/// `kept_modes` may be in any order; the order fixes the mode labels of the
/// output space. Keeping every mode returns the embedded projector, keeping
/// none the scalar 1 on the zero-mode space.
pub fn reduce_state(state: &StateVector, kept_modes: &[usize]) -> Result<DensityMatrix> {
    let basis = state.basis();
    let (traced, new_position) = resolve_kept(basis, kept_modes)?;
    let out_basis = Arc::new(FockBasis::full(kept_modes.len())?);
    let out_dim = out_basis.dim();

    // Group configurations by their traced pattern; each group contributes
    // the outer product of its signed kept-pattern amplitudes.
    let mut groups: HashMap<u64, Vec<(usize, C64)>> = HashMap::new();
    for (idx, config) in basis.configs().iter().enumerate() {
        let amp = state.amplitude(idx);
        if amp.norm() == 0.0 {
            continue;
        }
        let (a, b, sign) = split_config(config, kept_modes, &traced, &new_position);
        groups
            .entry(b)
            .or_default()
            .push((a as usize, amp * C64::new(sign as f64, 0.0)));
    }

    let mut matrix = DMatrix::<C64>::zeros(out_dim, out_dim);
    for members in groups.values() {
        for &(ar, amp_r) in members {
            for &(ac, amp_c) in members {
                matrix[(ar, ac)] += amp_r * amp_c.conj();
            }
        }
    }
    DensityMatrix::new(out_basis, matrix)
}

/// Reduced density matrix of a (possibly mixed) operator on `kept_modes`.
pub fn reduce_density_matrix(dm: &DensityMatrix, kept_modes: &[usize]) -> Result<DensityMatrix> {
    let basis = dm.basis();
    let (traced, new_position) = resolve_kept(basis, kept_modes)?;
    let out_basis = Arc::new(FockBasis::full(kept_modes.len())?);
    let out_dim = out_basis.dim();

    let mut groups: HashMap<u64, Vec<(usize, usize, i8)>> = HashMap::new();
    for (idx, config) in basis.configs().iter().enumerate() {
        let (a, b, sign) = split_config(config, kept_modes, &traced, &new_position);
        groups.entry(b).or_default().push((idx, a as usize, sign));
    }

    let mut matrix = DMatrix::<C64>::zeros(out_dim, out_dim);
    for members in groups.values() {
        for &(xi, ar, sr) in members {
            for &(yi, ac, sc) in members {
                let v = dm.matrix()[(xi, yi)];
                if v.norm() != 0.0 {
                    matrix[(ar, ac)] += v * C64::new((sr * sc) as f64, 0.0);
                }
            }
        }
    }
    DensityMatrix::new(out_basis, matrix)
}

/// Diagonal of the one-orbital reduced density matrix in the local basis
/// `{empty, up, down, up+down}`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OneOrbitalSpectrum {
    /// Probabilities `(p_empty, p_up, p_down, p_double)`, summing to one.
    pub probs: [f64; 4],
}

impl OneOrbitalSpectrum {
    pub fn new(probs: [f64; 4]) -> Result<Self> {
        let sum: f64 = probs.iter().sum();
        if probs.iter().any(|&p| !(-DM_TOL..=1.0 + DM_TOL).contains(&p))
            || (sum - 1.0).abs() > DM_TOL
        {
            return Err(CoreError::InvalidInput(format!(
                "invalid one-orbital spectrum {probs:?} (sum {sum})"
            )));
        }
        Ok(OneOrbitalSpectrum {
            probs: probs.map(|p| p.clamp(0.0, 1.0)),
        })
    }
}

/// One-orbital reduced density matrix of a fixed-(N, M) pure state.
///
/// The result is diagonal in the local occupation basis; off-diagonal leakage
/// above [`SECTOR_LEAK_TOL`] signals broken sector symmetry upstream and is
/// reported as an error, anything below is dropped.
pub fn one_orbital_rdm(
    state: &StateVector,
    orbital: usize,
) -> Result<(DensityMatrix, OneOrbitalSpectrum)> {
    require_fixed_sector(state)?;
    let reduced = reduce_state(state, &[2 * orbital, 2 * orbital + 1])?;
    let mut leak: f64 = 0.0;
    for r in 0..4 {
        for c in 0..4 {
            if r != c {
                leak = leak.max(reduced.matrix()[(r, c)].norm());
            }
        }
    }
    if leak > SECTOR_LEAK_TOL {
        return Err(CoreError::SectorViolation {
            context: format!("one-orbital RDM of orbital {orbital} has off-diagonal weight"),
            magnitude: leak,
        });
    }
    let mut diag = DMatrix::<C64>::zeros(4, 4);
    let mut probs = [0.0; 4];
    for i in 0..4 {
        let p = reduced.matrix()[(i, i)].re.max(0.0);
        probs[i] = p;
        diag[(i, i)] = C64::new(p, 0.0);
    }
    let cleaned = reduced.replace_matrix(diag)?;
    Ok((cleaned, OneOrbitalSpectrum::new(probs)?))
}

/// Two-orbital reduced density matrix on the 16-dimensional product space
/// `{empty, up, down, double}_i (x) {...}_j`, with the particle/spin sector
/// mask attached.
pub fn two_orbital_rdm(state: &StateVector, i: usize, j: usize) -> Result<DensityMatrix> {
    if i == j {
        return Err(CoreError::InvalidInput(format!(
            "two-orbital RDM needs distinct orbitals, got ({i}, {j})"
        )));
    }
    require_fixed_sector(state)?;
    let kept = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1];
    let reduced = reduce_state(state, &kept)?;

    let split = Bipartition::new(4, &[0, 1])?;
    let mask = SectorMask::two_orbital(split, SsrMode::None);
    let mut matrix = reduced.matrix().clone();
    let mut leak: f64 = 0.0;
    for r in 0..16 {
        for c in 0..16 {
            if !mask.allowed(reduced.basis(), r, c) {
                leak = leak.max(matrix[(r, c)].norm());
                matrix[(r, c)] = C64::new(0.0, 0.0);
            }
        }
    }
    if leak > SECTOR_LEAK_TOL {
        return Err(CoreError::SectorViolation {
            context: format!("two-orbital RDM of orbitals ({i}, {j}) leaks outside sector mask"),
            magnitude: leak,
        });
    }
    Ok(reduced.replace_matrix(matrix)?.with_mask(mask))
}

fn require_fixed_sector(state: &StateVector) -> Result<()> {
    let sector = state.basis().sector();
    let fixed_n = sector.particle_count.is_some()
        || state
            .basis()
            .configs()
            .iter()
            .all(|c| c.particle_count() == state.basis().config(0).particle_count());
    let fixed_m = sector.ms2.is_some()
        || state
            .basis()
            .configs()
            .iter()
            .all(|c| c.ms2() == state.basis().config(0).ms2());
    if fixed_n && fixed_m {
        Ok(())
    } else {
        Err(CoreError::InvalidInput(
            "state must live in a fixed (N, M) sector".into(),
        ))
    }
}

/// The one-particle reduced density matrix `gamma_{m,n} = <c+_n c_m>`.
#[derive(Debug, Clone)]
pub struct OneParticleRdm {
    gamma: DMatrix<C64>,
    particle_count: u32,
}

impl OneParticleRdm {
    pub fn gamma(&self) -> &DMatrix<C64> {
        &self.gamma
    }

    pub fn particle_count(&self) -> u32 {
        self.particle_count
    }

    /// Natural occupation numbers in decreasing order.
    pub fn natural_occupations(&self) -> NaturalOccupations {
        NaturalOccupations {
            lambdas: self.natural_basis().0,
        }
    }

    /// Occupations plus the natural-orbital rotation (columns sorted by
    /// decreasing occupation, deterministically phase-fixed).
    pub fn natural_basis(&self) -> (Vec<f64>, DMatrix<C64>) {
        let eig = self.gamma.clone().symmetric_eigen();
        let d = eig.eigenvalues.len();
        let mut order: Vec<usize> = (0..d).collect();
        // Decreasing eigenvalue; ties broken by the position of the largest
        // component, keeping the rotation reproducible.
        order.sort_by(|&a, &b| {
            eig.eigenvalues[b]
                .total_cmp(&eig.eigenvalues[a])
                .then_with(|| {
                    peak_index(&eig.eigenvectors.column(a).into_owned())
                        .cmp(&peak_index(&eig.eigenvectors.column(b).into_owned()))
                })
        });
        let lambdas: Vec<f64> = order
            .iter()
            .map(|&i| eig.eigenvalues[i].clamp(0.0, 1.0))
            .collect();
        let mut u = DMatrix::<C64>::zeros(d, d);
        for (new_col, &old_col) in order.iter().enumerate() {
            let mut col: DVector<C64> = eig.eigenvectors.column(old_col).into_owned();
            let peak = peak_index(&col);
            let phase = col[peak];
            if phase.norm() > 1e-15 {
                col *= phase.conj() / phase.norm();
            }
            u.set_column(new_col, &col);
        }
        (lambdas, u)
    }
}

fn peak_index(v: &DVector<C64>) -> usize {
    let mut best = 0usize;
    for i in 1..v.len() {
        if v[i].norm() > v[best].norm() + 1e-12 {
            best = i;
        }
    }
    best
}

/// Compute the one-particle RDM of a normalized state.
pub fn one_particle_rdm(state: &StateVector) -> Result<OneParticleRdm> {
    let d = state.basis().mode_count();
    let n = state.particle_count().ok_or_else(|| {
        CoreError::InvalidInput("one-particle RDM requires a fixed particle number".into())
    })?;
    let mut gamma = DMatrix::<C64>::zeros(d, d);
    for create in 0..d {
        for annihilate in 0..=create {
            let w = crate::models::apply_hopping(state, create, annihilate)?;
            // gamma[m, n] = <Psi| c+_n c_m |Psi> with m = annihilate, n = create.
            let val = state.amplitudes().dotc(&w);
            gamma[(annihilate, create)] = val;
            if annihilate != create {
                gamma[(create, annihilate)] = val.conj();
            }
        }
    }
    let trace = gamma.trace();
    if (trace.re - n as f64).abs() > 1e-8 {
        return Err(CoreError::InvalidDensityMatrix(format!(
            "one-particle RDM trace {} differs from N={n}",
            trace.re
        )));
    }
    let eigs = gamma.clone().symmetric_eigen().eigenvalues;
    if eigs.iter().any(|&l| l < -EIG_CLIP || l > 1.0 + EIG_CLIP) {
        return Err(CoreError::InvalidDensityMatrix(
            "one-particle RDM occupation outside [0, 1]".into(),
        ));
    }
    Ok(OneParticleRdm {
        gamma,
        particle_count: n,
    })
}

/// Natural occupation numbers, sorted in decreasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalOccupations {
    lambdas: Vec<f64>,
}

impl NaturalOccupations {
    pub fn from_sorted(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.windows(2).any(|w| w[0] < w[1] - 1e-12) {
            return Err(CoreError::InvalidInput(
                "occupations must be sorted decreasingly".into(),
            ));
        }
        Ok(NaturalOccupations { lambdas })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// The reference occupation vector `(1, ..., 1, 0, ..., 0)` of a
    /// configuration state with `n` particles.
    pub fn hf_point(&self, n: u32) -> Vec<f64> {
        (0..self.lambdas.len())
            .map(|i| if (i as u32) < n { 1.0 } else { 0.0 })
            .collect()
    }
}

/// The l1 distance of the natural occupations from the Hartree-Fock point:
/// `sum_{a <= N} (1 - lambda_a) + sum_{a > N} lambda_a`.
pub fn intrinsic_correlation(occs: &NaturalOccupations, n: u32) -> f64 {
    occs.lambdas
        .iter()
        .enumerate()
        .map(|(i, &l)| if (i as u32) < n { 1.0 - l } else { l })
        .sum()
}

/// Overlap of a state with the configuration state of its first `N` natural
/// spin-orbitals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlaterOverlap {
    /// `|<natural configuration | Psi>|^2`.
    pub overlap: f64,
    /// Set when the occupation at the Fermi boundary is degenerate; the
    /// overlap is then convention-dependent (the best resolution over the
    /// degenerate block is reported).
    pub degenerate: bool,
}

/// Squared overlap with the determinant of the `N` highest-occupied natural
/// orbitals, by rotating the reference configuration into the natural basis.
pub fn natural_slater_overlap(state: &StateVector) -> Result<SlaterOverlap> {
    let gamma = one_particle_rdm(state)?;
    let n = gamma.particle_count() as usize;
    let (lambdas, u) = gamma.natural_basis();
    let d = lambdas.len();
    if n == 0 {
        return Ok(SlaterOverlap {
            overlap: if state.amplitude(0).norm() > 0.0 { 1.0 } else { 0.0 },
            degenerate: false,
        });
    }

    let boundary_degenerate = n < d && (lambdas[n - 1] - lambdas[n]).abs() < 1e-10;
    if !boundary_degenerate {
        let cols: Vec<usize> = (0..n).collect();
        return Ok(SlaterOverlap {
            overlap: determinant_overlap(state, &u, &cols),
            degenerate: false,
        });
    }

    // Degenerate Fermi boundary: any choice of natural orbitals within the
    // degenerate block is valid, so report the best discrete choice.
    let level = lambdas[n - 1];
    let group: Vec<usize> = (0..d)
        .filter(|&i| (lambdas[i] - level).abs() < 1e-10)
        .collect();
    let fixed: Vec<usize> = (0..n).filter(|i| !group.contains(i)).collect();
    let need = n - fixed.len();
    let mut best = 0.0_f64;
    for combo in combinations_of(&group, need).into_iter().take(512) {
        let mut cols = fixed.clone();
        cols.extend(combo);
        cols.sort_unstable();
        best = best.max(determinant_overlap(state, &u, &cols));
    }
    Ok(SlaterOverlap {
        overlap: best,
        degenerate: true,
    })
}

/// `|sum_x psi_x det(S_x)|^2` with `S_x[b, a] = conj(U[m_b, col_a])` over the
/// occupied modes `m_b` of configuration `x`.
fn determinant_overlap(state: &StateVector, u: &DMatrix<C64>, cols: &[usize]) -> f64 {
    let n = cols.len();
    let mut amp = C64::new(0.0, 0.0);
    for (idx, config) in state.basis().configs().iter().enumerate() {
        let psi = state.amplitude(idx);
        if psi.norm() < 1e-15 {
            continue;
        }
        let modes = config.occupied_modes();
        debug_assert_eq!(modes.len(), n);
        let mut s = DMatrix::<C64>::zeros(n, n);
        for (bi, &m) in modes.iter().enumerate() {
            for (ai, &c) in cols.iter().enumerate() {
                s[(ai, bi)] = u[(m, c)].conj();
            }
        }
        amp += s.determinant() * psi;
    }
    amp.norm_sqr()
}

fn combinations_of(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if k > items.len() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        if items.len() - i < k {
            break;
        }
        for mut rest in combinations_of(&items[i + 1..], k - 1) {
            let mut combo = vec![first];
            combo.append(&mut rest);
            out.push(combo);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::SectorLabel;
    use crate::models::{analytic_state, AnalyticState, HubbardParams};
    use approx::assert_relative_eq;

    fn one_electron() -> StateVector {
        analytic_state(AnalyticState::OneElectron).unwrap()
    }

    fn dissociated_h2() -> StateVector {
        analytic_state(AnalyticState::DissociatedH2).unwrap()
    }

    #[test]
    fn one_electron_keep_first_orbital() {
        // Enumerating the amplitudes by hand: the kept orbital is empty or
        // spin-up occupied with probability 1/2 each.
        let dm = reduce_state(&one_electron(), &[0, 1]).unwrap();
        let expected = [0.5, 0.5, 0.0, 0.0];
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { expected[i] } else { 0.0 };
                assert_relative_eq!(dm.matrix()[(i, j)].re, want, epsilon = 1e-12);
                assert_relative_eq!(dm.matrix()[(i, j)].im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn configuration_states_reduce_to_pure_orbitals() {
        let basis = Arc::new(FockBasis::enumerate(4, SectorLabel::with_n_ms2(2, 0)).unwrap());
        // |1up 2down>
        let config = OccupationConfig::from_occupied_modes(4, &[0, 3]).unwrap();
        let state = StateVector::configuration(basis, config).unwrap();
        let dm = reduce_state(&state, &[0, 1]).unwrap();
        // Pure |up><up| with zero entropy.
        assert_relative_eq!(dm.matrix()[(1, 1)].re, 1.0, epsilon = 1e-12);
        let spectrum = dm.clipped_spectrum();
        let entropy: f64 = spectrum
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.ln())
            .sum();
        assert_relative_eq!(entropy, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn keeping_all_modes_gives_rank_one_projector() {
        let state = dissociated_h2();
        let dm = reduce_state(&state, &[0, 1, 2, 3]).unwrap();
        let spectrum = dm.clipped_spectrum();
        let max = spectrum.iter().cloned().fold(0.0, f64::max);
        assert_relative_eq!(max, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn keeping_no_modes_gives_scalar_one() {
        let dm = reduce_state(&dissociated_h2(), &[]).unwrap();
        assert_eq!(dm.dim(), 1);
        assert_relative_eq!(dm.matrix()[(0, 0)].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_composes() {
        let params = HubbardParams::new(1.0, 3.0, 3).unwrap();
        let basis = Arc::new(FockBasis::enumerate(6, SectorLabel::with_n_ms2(3, 1)).unwrap());
        let h = crate::models::hubbard_hamiltonian(&params, &basis).unwrap();
        let gs = crate::groundstate::ground_state(&h).unwrap().state;

        // Trace to modes {0,1,2,3}, then to {0,1} of the reduced space,
        // versus tracing directly to {0,1}.
        let two_step_outer = reduce_state(&gs, &[0, 1, 2, 3]).unwrap();
        let two_step = reduce_density_matrix(&two_step_outer, &[0, 1]).unwrap();
        let direct = reduce_state(&gs, &[0, 1]).unwrap();
        let diff = two_step.matrix() - direct.matrix();
        assert!(diff.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn complementary_reductions_are_isospectral() {
        let params = HubbardParams::dimer(0.8, 2.5).unwrap();
        let state = analytic_state(AnalyticState::HubbardDimer(params)).unwrap();
        let a = reduce_state(&state, &[0, 1]).unwrap();
        let b = reduce_state(&state, &[2, 3]).unwrap();
        let mut sa = a.clipped_spectrum();
        let mut sb = b.clipped_spectrum();
        sa.sort_by(f64::total_cmp);
        sb.sort_by(f64::total_cmp);
        for (x, y) in sa.iter().zip(&sb) {
            assert_relative_eq!(x, y, epsilon = 1e-10);
        }
    }

    #[test]
    fn one_orbital_examples() {
        let (_, p) = one_orbital_rdm(&dissociated_h2(), 0).unwrap();
        assert_relative_eq!(p.probs[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(p.probs[1], 0.5, epsilon = 1e-12);
        assert_relative_eq!(p.probs[2], 0.5, epsilon = 1e-12);
        assert_relative_eq!(p.probs[3], 0.0, epsilon = 1e-12);
        let (_, p1) = one_orbital_rdm(&dissociated_h2(), 1).unwrap();
        assert_eq!(p.probs, p1.probs);

        let (_, p) = one_orbital_rdm(&one_electron(), 0).unwrap();
        for (got, want) in p.probs.iter().zip([0.5, 0.5, 0.0, 0.0]) {
            assert_relative_eq!(got, &want, epsilon = 1e-12);
        }

        let params = HubbardParams::dimer(1.0, 0.0).unwrap();
        let state = analytic_state(AnalyticState::HubbardDimer(params)).unwrap();
        let (_, p) = one_orbital_rdm(&state, 0).unwrap();
        for &pi in &p.probs {
            assert_relative_eq!(pi, 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn two_orbital_rdm_of_two_orbital_system_is_the_pure_state() {
        let state = dissociated_h2();
        let dm = two_orbital_rdm(&state, 0, 1).unwrap();
        // Embedded projector: trace of the square is one.
        let sq = dm.matrix() * dm.matrix();
        assert_relative_eq!(sq.trace().re, 1.0, epsilon = 1e-10);
        // Entries match the pure state's outer product on the sector configs.
        let full = Arc::new(FockBasis::full(4).unwrap());
        for (xi, cx) in state.basis().configs().iter().enumerate() {
            for (yi, cy) in state.basis().configs().iter().enumerate() {
                let r = full.index_of(cx).unwrap();
                let c = full.index_of(cy).unwrap();
                let want = state.amplitude(xi) * state.amplitude(yi).conj();
                assert_relative_eq!((dm.matrix()[(r, c)] - want).norm(), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn two_orbital_marginals_match_one_orbital_rdm() {
        let params = HubbardParams::new(1.0, 4.0, 4).unwrap();
        let basis = Arc::new(FockBasis::enumerate(8, SectorLabel::with_n_ms2(4, 0)).unwrap());
        let h = crate::models::hubbard_hamiltonian(&params, &basis).unwrap();
        let gs = crate::groundstate::ground_state(&h).unwrap().state;
        for (i, j) in [(0usize, 1usize), (0, 3), (2, 1)] {
            let pair = two_orbital_rdm(&gs, i, j).unwrap();
            let marg_i = reduce_density_matrix(&pair, &[0, 1]).unwrap();
            let (one_i, _) = one_orbital_rdm(&gs, i).unwrap();
            let diff = marg_i.matrix() - one_i.matrix();
            assert!(diff.iter().all(|z| z.norm() < 1e-12), "pair ({i},{j})");
        }
    }

    #[test]
    fn two_orbital_rdm_rejects_equal_orbitals() {
        assert!(two_orbital_rdm(&dissociated_h2(), 1, 1).is_err());
    }

    #[test]
    fn one_particle_rdm_examples() {
        // Dissociated H2: every spin-orbital half filled.
        let g = one_particle_rdm(&dissociated_h2()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 0.5 } else { 0.0 };
                assert_relative_eq!(g.gamma()[(i, j)].re, want, epsilon = 1e-12);
            }
        }

        // Configuration state: projector onto the occupied modes.
        let basis = Arc::new(FockBasis::enumerate(4, SectorLabel::with_n_ms2(2, 0)).unwrap());
        let config = OccupationConfig::from_occupied_modes(4, &[0, 3]).unwrap();
        let state = StateVector::configuration(basis, config).unwrap();
        let g = one_particle_rdm(&state).unwrap();
        let occs = g.natural_occupations();
        assert_relative_eq!(occs.lambdas()[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(occs.lambdas()[1], 1.0, epsilon = 1e-12);
        assert_relative_eq!(occs.lambdas()[2], 0.0, epsilon = 1e-12);

        // Noninteracting dimer: a filled bonding orbital.
        let params = HubbardParams::dimer(1.0, 0.0).unwrap();
        let state = analytic_state(AnalyticState::HubbardDimer(params)).unwrap();
        let g = one_particle_rdm(&state).unwrap();
        let l = g.natural_occupations();
        assert_relative_eq!(l.lambdas()[0], 1.0, epsilon = 1e-10);
        assert_relative_eq!(l.lambdas()[1], 1.0, epsilon = 1e-10);
        assert_relative_eq!(l.lambdas()[2], 0.0, epsilon = 1e-10);
        assert_relative_eq!(l.lambdas()[3], 0.0, epsilon = 1e-10);
    }

    #[test]
    fn intrinsic_correlation_examples() {
        let occs = NaturalOccupations::from_sorted(vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(intrinsic_correlation(&occs, 2), 0.0, epsilon = 1e-14);

        let occs = NaturalOccupations::from_sorted(vec![0.5, 0.5, 0.5, 0.5]).unwrap();
        assert_relative_eq!(intrinsic_correlation(&occs, 2), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn slater_overlap_examples() {
        // A configuration state overlaps itself perfectly.
        let basis = Arc::new(FockBasis::enumerate(4, SectorLabel::with_n_ms2(2, 0)).unwrap());
        let config = OccupationConfig::from_occupied_modes(4, &[0, 3]).unwrap();
        let state = StateVector::configuration(basis, config).unwrap();
        let res = natural_slater_overlap(&state).unwrap();
        assert_relative_eq!(res.overlap, 1.0, epsilon = 1e-10);

        // Dissociated H2: fully degenerate occupations; the best determinant
        // carries half the weight and the degeneracy is flagged.
        let res = natural_slater_overlap(&dissociated_h2()).unwrap();
        assert!(res.degenerate);
        assert_relative_eq!(res.overlap, 0.5, epsilon = 1e-10);
    }
}
