//! Entropies, mutual information, entanglement and classical correlation.
//!
//! Total correlation across a bipartition is the quantum mutual information
//! `I = S(rho_A) + S(rho_B) - S(rho)`. Entanglement is the relative entropy
//! to the closest separable state `sigma*`, found by the conditional-gradient
//! optimizer in [`optimizer`]; the classical correlation is the remaining
//! distance `S(sigma* || rho_A (x) rho_B)`. For single orbitals of a pure
//! fixed-sector state all measures collapse to closed forms in the
//! one-orbital spectrum. Everything is reported in nats.

mod optimizer;

pub use optimizer::{
    closest_separable, OptimizerConfig, ProductState, SeparableApproximation,
};

use nalgebra::DMatrix;

use crate::error::{CoreError, Result};
use crate::fock::FockBasis;
use crate::rdm::{
    clip_spectrum, one_orbital_rdm, reduce_density_matrix, two_orbital_rdm, DensityMatrix,
    OneOrbitalSpectrum,
};
use crate::ssr::{project_ssr, Bipartition, SectorMask, SsrMode};
use crate::fock::StateVector;
use crate::C64;

/// Eigenvalues below this are treated as outside the support.
pub const SUPPORT_TOL: f64 = 1e-12;

/// Correlation values below this are reported as exactly zero.
pub const VALUE_FLOOR: f64 = 1e-10;

/// Partial-transpose eigenvalues below `-PPT_TOL` certify entanglement.
pub const PPT_TOL: f64 = 1e-10;

/// `-sum p ln p` with the `0 ln 0 = 0` convention.
pub fn entropy_of_probs(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum()
}

/// Von Neumann entropy of a density matrix over its clipped spectrum, nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_probs(&rho.clipped_spectrum())
}

/// Quantum relative entropy `S(rho || sigma) = Tr[rho (ln rho - ln sigma)]`.
///
/// Returns `f64::INFINITY` when the support of `rho` is not contained in the
/// support of `sigma`; that is a value signal, not an error.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    relative_entropy_matrices(rho.matrix(), sigma.matrix())
}

pub(crate) fn relative_entropy_matrices(rho: &DMatrix<C64>, sigma: &DMatrix<C64>) -> f64 {
    debug_assert_eq!(rho.nrows(), sigma.nrows());
    let er = rho.clone().symmetric_eigen();
    let es = sigma.clone().symmetric_eigen();
    let r = clip_spectrum(er.eigenvalues.as_slice());
    let s: Vec<f64> = es.eigenvalues.iter().map(|&x| x.max(0.0)).collect();

    let mut value: f64 = r
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum();
    for (i, &ri) in r.iter().enumerate() {
        if ri <= SUPPORT_TOL {
            continue;
        }
        let ui = er.eigenvectors.column(i);
        for (j, &sj) in s.iter().enumerate() {
            let overlap = ui.dotc(&es.eigenvectors.column(j)).norm_sqr();
            if overlap < 1e-14 {
                continue;
            }
            if sj <= SUPPORT_TOL {
                return f64::INFINITY;
            }
            value -= ri * overlap * sj.ln();
        }
    }
    value.max(0.0)
}

/// Quantum mutual information `S(rho_A) + S(rho_B) - S(rho)` across `split`.
pub fn mutual_information(rho: &DensityMatrix, split: &Bipartition) -> Result<f64> {
    let ra = reduce_density_matrix(rho, split.side_a())?;
    let rb = reduce_density_matrix(rho, split.side_b())?;
    let i = von_neumann_entropy(&ra) + von_neumann_entropy(&rb) - von_neumann_entropy(rho);
    Ok(i.max(0.0))
}

/// Total, quantum and classical correlation for one SSR regime, in nats.
///
/// `classical` is absent on the closed-form single-orbital path. Values
/// below [`VALUE_FLOOR`] are reported as exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CorrelationTriple {
    pub ssr: SsrMode,
    pub total: f64,
    pub quantum: f64,
    pub classical: Option<f64>,
}

impl CorrelationTriple {
    pub fn new(ssr: SsrMode, total: f64, quantum: f64, classical: Option<f64>) -> Self {
        let floor = |x: f64| if x < VALUE_FLOOR { 0.0 } else { x };
        CorrelationTriple {
            ssr,
            total: floor(total),
            quantum: floor(quantum),
            classical: classical.map(floor),
        }
    }
}

/// Closed-form single-orbital total correlation and entanglement of a pure
/// fixed-(N, M) state, from the one-orbital spectrum alone.
///
/// Without SSR the entanglement is the spectrum entropy and the total
/// correlation twice that; under P-SSR and N-SSR both follow from the
/// pairwise-merged spectra, and `I^Q = E^Q + E` holds identically.
pub fn single_orbital_measures(p: &OneOrbitalSpectrum, ssr: SsrMode) -> CorrelationTriple {
    let h = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    let [p1, p2, p3, p4] = p.probs;
    let s1 = h(p1) + h(p2) + h(p3) + h(p4);
    let (total, quantum) = match ssr {
        SsrMode::None => (2.0 * s1, s1),
        SsrMode::Parity => {
            let merged = h(p1 + p4) + h(p2 + p3);
            (2.0 * s1 - merged, s1 - merged)
        }
        SsrMode::Number => {
            let e = h(p2) + h(p3) - h(p2 + p3);
            (s1 + e, e)
        }
    };
    CorrelationTriple::new(ssr, total, quantum, None)
}

/// Index maps between a full Fock basis and the tensor product of the two
/// local spaces of a bipartition.
pub(crate) struct TensorSplit {
    pub dim_a: usize,
    pub dim_b: usize,
    /// Local indices of every joint basis index.
    pub a_of: Vec<usize>,
    pub b_of: Vec<usize>,
    /// joint[a][b] = joint basis index.
    pub joint: Vec<Vec<usize>>,
}

impl TensorSplit {
    pub fn new(basis: &FockBasis, split: &Bipartition) -> Result<Self> {
        if split.mode_count() != basis.mode_count() {
            return Err(CoreError::DimensionMismatch(format!(
                "bipartition over {} modes on a {}-mode basis",
                split.mode_count(),
                basis.mode_count()
            )));
        }
        let dim_a = 1usize << split.side_a().len();
        let dim_b = 1usize << split.side_b().len();
        if basis.dim() != dim_a * dim_b {
            return Err(CoreError::DimensionMismatch(
                "tensor split requires the full Fock space of the mode set".into(),
            ));
        }
        let mut a_of = vec![0usize; basis.dim()];
        let mut b_of = vec![0usize; basis.dim()];
        let mut joint = vec![vec![usize::MAX; dim_b]; dim_a];
        for (i, config) in basis.configs().iter().enumerate() {
            let a = split.a_bits(config) as usize;
            let b = split.b_bits(config) as usize;
            a_of[i] = a;
            b_of[i] = b;
            joint[a][b] = i;
        }
        Ok(TensorSplit {
            dim_a,
            dim_b,
            a_of,
            b_of,
            joint,
        })
    }
}

/// Outcome of the Peres-Horodecki partial-transpose test.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PptResult {
    /// Smallest eigenvalue of the partially transposed matrix.
    pub min_eigenvalue: f64,
    pub verdict: PptVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum PptVerdict {
    /// Positive partial transpose: no entanglement certified.
    Ppt,
    /// Negative partial transpose: the state is entangled.
    Npt,
}

/// Partial transpose on side B and its smallest eigenvalue.
pub fn ppt_test(rho: &DensityMatrix, split: &Bipartition) -> Result<PptResult> {
    let ts = TensorSplit::new(rho.basis(), split)?;
    let n = rho.dim();
    let mut pt = DMatrix::<C64>::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let src_r = ts.joint[ts.a_of[r]][ts.b_of[c]];
            let src_c = ts.joint[ts.a_of[c]][ts.b_of[r]];
            pt[(r, c)] = rho.matrix()[(src_r, src_c)];
        }
    }
    let min_eigenvalue = pt
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let verdict = if min_eigenvalue < -PPT_TOL {
        PptVerdict::Npt
    } else {
        PptVerdict::Ppt
    };
    Ok(PptResult {
        min_eigenvalue,
        verdict,
    })
}

/// Relative entropy of entanglement under an SSR:
/// project, then minimize the distance to the separable set.
pub fn rel_entropy_of_entanglement(
    rho: &DensityMatrix,
    ssr: SsrMode,
    split: &Bipartition,
    config: &OptimizerConfig,
) -> Result<f64> {
    let analysis = pair_measures(rho, ssr, split, config)?;
    Ok(analysis.triple.quantum)
}

/// Classical correlation under an SSR: distance from the closest separable
/// state to the product of the marginals.
pub fn classical_correlation(
    rho: &DensityMatrix,
    ssr: SsrMode,
    split: &Bipartition,
    config: &OptimizerConfig,
) -> Result<f64> {
    let analysis = pair_measures(rho, ssr, split, config)?;
    analysis.triple.classical.ok_or_else(|| {
        CoreError::InvalidInput("pairwise pipeline did not produce a classical value".into())
    })
}

/// Full geometric analysis of one bipartite density matrix under one SSR.
#[derive(Debug, Clone)]
pub struct PairAnalysis {
    pub triple: CorrelationTriple,
    pub approximation: SeparableApproximation,
    pub ppt: PptResult,
}

/// Project onto the SSR, compute the mutual information analytically and the
/// entanglement/classical split through the optimizer.
pub fn pair_measures(
    rho: &DensityMatrix,
    ssr: SsrMode,
    split: &Bipartition,
    config: &OptimizerConfig,
) -> Result<PairAnalysis> {
    let projected = project_ssr(rho, split, ssr)?;
    let mask = projected
        .mask()
        .cloned()
        .unwrap_or_else(|| SectorMask::ssr_only(split.clone(), ssr));
    let total = mutual_information(&projected, split)?;
    let approximation = closest_separable(&projected, &mask, config)?;
    let ppt = ppt_test(&projected, split)?;
    let triple = CorrelationTriple::new(
        ssr,
        total,
        approximation.distance,
        Some(approximation.classical),
    );
    Ok(PairAnalysis {
        triple,
        approximation,
        ppt,
    })
}

/// What [`correlation_profile`] analyzes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileTarget {
    /// One orbital against the rest (closed forms; pure states only).
    SingleOrbital(usize),
    /// Two orbitals against each other (geometric pipeline).
    OrbitalPair(usize, usize),
}

/// End-to-end pipeline: reduced density matrix, SSR projection, measures.
///
/// Pair targets get a deterministic per-(i, j, SSR) optimizer seed derived
/// from the configured base seed, so a parallel map over pairs reproduces
/// bit-identical results regardless of scheduling.
pub fn correlation_profile(
    state: &StateVector,
    target: ProfileTarget,
    ssr: SsrMode,
    config: &OptimizerConfig,
) -> Result<CorrelationTriple> {
    match target {
        ProfileTarget::SingleOrbital(j) => {
            let (_, spectrum) = one_orbital_rdm(state, j)?;
            Ok(single_orbital_measures(&spectrum, ssr))
        }
        ProfileTarget::OrbitalPair(i, j) => {
            let rho = two_orbital_rdm(state, i, j)?;
            let split = Bipartition::new(4, &[0, 1])?;
            let seeded = config.reseeded(mix_seed(config.seed, i, j, ssr));
            let analysis = pair_measures(&rho, ssr, &split, &seeded)?;
            Ok(analysis.triple)
        }
    }
}

/// Deterministic seed for the (i, j, ssr) cell of a pairwise analysis.
pub fn mix_seed(base: u64, i: usize, j: usize, ssr: SsrMode) -> u64 {
    let tag = match ssr {
        SsrMode::None => 1u64,
        SsrMode::Parity => 2,
        SsrMode::Number => 3,
    };
    // splitmix64 over the packed fields
    let mut z = base
        ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (j as u64).rotate_left(32)
        ^ tag.wrapping_shl(48);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{analytic_state, AnalyticState, HubbardParams};
    use crate::rdm::DensityMatrix;
    use approx::assert_relative_eq;
    use std::sync::Arc;

    const LN2: f64 = std::f64::consts::LN_2;

    fn orbital_split() -> Bipartition {
        Bipartition::new(4, &[0, 1]).unwrap()
    }

    fn h2_rho() -> DensityMatrix {
        let state = analytic_state(AnalyticState::DissociatedH2).unwrap();
        two_orbital_rdm(&state, 0, 1).unwrap()
    }

    fn one_electron_rho() -> DensityMatrix {
        let state = analytic_state(AnalyticState::OneElectron).unwrap();
        two_orbital_rdm(&state, 0, 1).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert_relative_eq!(entropy_of_probs(&[1.0]), 0.0, epsilon = 1e-14);
        assert_relative_eq!(entropy_of_probs(&[0.5, 0.5]), LN2, epsilon = 1e-14);
        assert_relative_eq!(
            entropy_of_probs(&[0.25, 0.25, 0.25, 0.25]),
            2.0 * LN2,
            epsilon = 1e-14
        );
    }

    #[test]
    fn relative_entropy_examples() {
        let rho = h2_rho();
        assert_relative_eq!(relative_entropy(&rho, &rho), 0.0, epsilon = 1e-12);

        // Orthogonal pure states: support violation signals +infinity.
        let basis = Arc::new(FockBasis::full(2).unwrap());
        let mut m1 = DMatrix::<C64>::zeros(4, 4);
        m1[(0, 0)] = C64::new(1.0, 0.0);
        let mut m2 = DMatrix::<C64>::zeros(4, 4);
        m2[(3, 3)] = C64::new(1.0, 0.0);
        let p1 = DensityMatrix::new(basis.clone(), m1).unwrap();
        let p2 = DensityMatrix::new(basis, m2).unwrap();
        assert!(relative_entropy(&p1, &p2).is_infinite());

        // S(rho || rho_A x rho_B) equals the mutual information.
        let split = orbital_split();
        let ra = reduce_density_matrix(&rho, split.side_a()).unwrap();
        let rb = reduce_density_matrix(&rho, split.side_b()).unwrap();
        let mut prod = DMatrix::<C64>::zeros(16, 16);
        for r in 0..16 {
            for c in 0..16 {
                // Joint index = a + 4 b on the full two-orbital space.
                let (ar, br) = (r % 4, r / 4);
                let (ac, bc) = (c % 4, c / 4);
                prod[(r, c)] = ra.matrix()[(ar, ac)] * rb.matrix()[(br, bc)];
            }
        }
        let prod_dm = DensityMatrix::new(rho.basis().clone(), prod).unwrap();
        let i_direct = mutual_information(&rho, &split).unwrap();
        assert_relative_eq!(
            relative_entropy(&rho, &prod_dm),
            i_direct,
            epsilon = 1e-10
        );
    }

    #[test]
    fn mutual_information_examples() {
        let split = orbital_split();
        assert_relative_eq!(
            mutual_information(&h2_rho(), &split).unwrap(),
            2.0 * LN2,
            epsilon = 1e-12
        );

        // A configuration state is a product state across orbitals.
        let basis = Arc::new(
            FockBasis::enumerate(4, crate::fock::SectorLabel::with_n_ms2(2, 0)).unwrap(),
        );
        let config = crate::fock::OccupationConfig::from_occupied_modes(4, &[0, 3]).unwrap();
        let state = crate::fock::StateVector::configuration(basis, config).unwrap();
        let rho = two_orbital_rdm(&state, 0, 1).unwrap();
        assert_relative_eq!(
            mutual_information(&rho, &split).unwrap(),
            0.0,
            epsilon = 1e-12
        );

        // One-electron state after the parity projection.
        let projected = crate::ssr::project_parity(&one_electron_rho(), &split).unwrap();
        assert_relative_eq!(
            mutual_information(&projected, &split).unwrap(),
            LN2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn single_orbital_closed_forms() {
        let p = OneOrbitalSpectrum::new([1.0, 0.0, 0.0, 0.0]).unwrap();
        for ssr in SsrMode::all() {
            let t = single_orbital_measures(&p, ssr);
            assert_eq!(t.total, 0.0);
            assert_eq!(t.quantum, 0.0);
        }

        // One-electron spectrum (1/2, 1/2, 0, 0).
        let p = OneOrbitalSpectrum::new([0.5, 0.5, 0.0, 0.0]).unwrap();
        let n = single_orbital_measures(&p, SsrMode::Number);
        assert_relative_eq!(n.total, LN2, epsilon = 1e-12);
        assert_relative_eq!(n.quantum, 0.0, epsilon = 1e-12);
        let pp = single_orbital_measures(&p, SsrMode::Parity);
        assert_relative_eq!(pp.quantum, 0.0, epsilon = 1e-12);

        // Dissociated-H2 spectrum (0, 1/2, 1/2, 0).
        let p = OneOrbitalSpectrum::new([0.0, 0.5, 0.5, 0.0]).unwrap();
        let n = single_orbital_measures(&p, SsrMode::Number);
        assert_relative_eq!(n.quantum, LN2, epsilon = 1e-12);
        assert_relative_eq!(n.total, 2.0 * LN2, epsilon = 1e-12);
    }

    #[test]
    fn closed_form_identity_total_is_quantum_plus_pure_entanglement() {
        // I^Q = E^Q + E holds identically in the spectrum.
        let spectra = [
            [0.1, 0.2, 0.3, 0.4],
            [0.7, 0.1, 0.15, 0.05],
            [0.25, 0.25, 0.25, 0.25],
            [0.5, 0.0, 0.0, 0.5],
        ];
        for probs in spectra {
            let p = OneOrbitalSpectrum::new(probs).unwrap();
            let e_pure = single_orbital_measures(&p, SsrMode::None).quantum;
            for ssr in [SsrMode::Parity, SsrMode::Number] {
                let t = single_orbital_measures(&p, ssr);
                assert_relative_eq!(t.total, t.quantum + e_pure, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn ppt_examples() {
        let split = orbital_split();

        // The dissociated-H2 state is a singlet: partial transpose has the
        // characteristic -1/2 witness eigenvalue.
        let res = ppt_test(&h2_rho(), &split).unwrap();
        assert_eq!(res.verdict, PptVerdict::Npt);
        assert_relative_eq!(res.min_eigenvalue, -0.5, epsilon = 1e-10);

        // Product states are PPT.
        let basis = Arc::new(
            FockBasis::enumerate(4, crate::fock::SectorLabel::with_n_ms2(2, 0)).unwrap(),
        );
        let config = crate::fock::OccupationConfig::from_occupied_modes(4, &[0, 3]).unwrap();
        let state = crate::fock::StateVector::configuration(basis, config).unwrap();
        let rho = two_orbital_rdm(&state, 0, 1).unwrap();
        let res = ppt_test(&rho, &split).unwrap();
        assert_eq!(res.verdict, PptVerdict::Ppt);

        // The number-projected one-electron state is separable, hence PPT.
        let projected = crate::ssr::project_number(&one_electron_rho(), &split).unwrap();
        let res = ppt_test(&projected, &split).unwrap();
        assert_eq!(res.verdict, PptVerdict::Ppt);
    }

    #[test]
    fn hubbard_limits_of_the_full_pipeline() {
        // Deep in the dissociation limit every SSR mode reproduces the
        // dissociated-H2 values.
        let config = OptimizerConfig::default();
        let params = HubbardParams::dimer(1e-3, 1.0).unwrap();
        let state = analytic_state(AnalyticState::HubbardDimer(params)).unwrap();
        for ssr in SsrMode::all() {
            let t =
                correlation_profile(&state, ProfileTarget::OrbitalPair(0, 1), ssr, &config)
                    .unwrap();
            assert!((t.total - 2.0 * LN2).abs() < 1e-3, "I {}", t.total);
            assert!((t.quantum - LN2).abs() < 1e-3, "E {}", t.quantum);
            let c = t.classical.unwrap();
            assert!((c - 0.5 * (4.0_f64 / 3.0).ln()).abs() < 1e-3, "C {c}");
        }

        // Strong hopping: total correlation approaches 4 ln 2.
        let params = HubbardParams::dimer(10.0, 1.0).unwrap();
        let state = analytic_state(AnalyticState::HubbardDimer(params)).unwrap();
        let t = correlation_profile(
            &state,
            ProfileTarget::OrbitalPair(0, 1),
            SsrMode::None,
            &config,
        )
        .unwrap();
        assert!((t.total - 4.0 * LN2).abs() < 1e-2, "I {}", t.total);
    }
}
