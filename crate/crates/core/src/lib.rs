//! Orbital correlation and entanglement analysis for fermionic quantum states.
//!
//! The crate quantifies the total, classical and quantum (entanglement)
//! correlation between orbitals of a fermionic state, with and without the
//! parity (P-SSR) and particle-number (N-SSR) superselection rules. It covers
//! the whole pipeline on exactly-diagonalizable systems:
//!
//! * [`fock`] — occupation-number bases, sector enumeration and signed
//!   creation/annihilation action;
//! * [`models`] — Hamiltonians from FCIDUMP integral files and built-in
//!   Hubbard models, plus a few closed-form reference states;
//! * [`groundstate`] — dense and Lanczos ground-state solvers on
//!   sector-restricted bases;
//! * [`rdm`] — fermionic mode partial traces, one- and two-orbital reduced
//!   density matrices, the one-particle RDM and natural occupations;
//! * [`ssr`] — superselection-rule projections onto physical states;
//! * [`entanglement`] — entropies, mutual information, the
//!   closest-separable-state optimizer, closed single-orbital formulas and
//!   the PPT separability test.
//!
//! All entropic quantities are reported in nats.

pub mod entanglement;
pub mod error;
pub mod fock;
pub mod groundstate;
pub mod models;
pub mod rdm;
pub mod ssr;

pub use entanglement::{
    classical_correlation, closest_separable, correlation_profile, mutual_information,
    rel_entropy_of_entanglement, relative_entropy, single_orbital_measures, von_neumann_entropy,
    CorrelationTriple, OptimizerConfig, PptVerdict, SeparableApproximation,
};
pub use error::CoreError;
pub use fock::{FockBasis, OccupationConfig, Parity, SectorLabel, StateVector};
pub use groundstate::{ground_state, EigenResult};
pub use models::{
    analytic_state, build_hamiltonian, hubbard_dimer_coefficients, hubbard_hamiltonian,
    parse_fcidump, AnalyticState, HubbardDimerCoefficients, HubbardParams, IntegralSet,
    SparseOperator,
};
pub use rdm::{
    intrinsic_correlation, natural_slater_overlap, one_orbital_rdm, one_particle_rdm,
    reduce_density_matrix, reduce_state, two_orbital_rdm, DensityMatrix, NaturalOccupations,
    OneOrbitalSpectrum, OneParticleRdm,
};
pub use ssr::{project_number, project_parity, Bipartition, SectorMask, SsrMode};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex<f64>;
