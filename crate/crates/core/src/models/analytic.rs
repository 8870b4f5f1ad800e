//! Closed-form two-orbital reference states.
//!
//! All three states are assembled by applying creation-operator strings from
//! [`crate::fock`], so their signs are guaranteed to match the global mode
//! order used everywhere else. The global phase is fixed by making the first
//! nonzero amplitude real positive.

use std::sync::Arc;

use crate::error::Result;
use crate::fock::{
    apply_creation, FockBasis, LadderOutcome, OccupationConfig, SectorLabel, StateVector,
};
use crate::C64;

use super::hubbard::{hubbard_dimer_coefficients, HubbardParams};

/// The built-in analytic states on the two-orbital (four-mode) Fock space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticState {
    /// One electron shared between two orbitals:
    /// `(f+_{1u} + f+_{2u}) |vac> / sqrt(2)`.
    OneElectron,
    /// Singlet of two electrons on two far-separated orbitals:
    /// `(f+_{1u} f+_{2d} - f+_{1d} f+_{2u}) |vac> / sqrt(2)`.
    DissociatedH2,
    /// Ground state of the half-filled Hubbard dimer, covalent weight `a`
    /// and ionic weight `b` from the closed-form coefficients.
    HubbardDimer(HubbardParams),
}

/// Construct the requested analytic state as a normalized [`StateVector`]
/// on its natural `(N, 2M)` sector basis.
pub fn analytic_state(kind: AnalyticState) -> Result<StateVector> {
    match kind {
        AnalyticState::OneElectron => {
            let basis = Arc::new(FockBasis::enumerate(4, SectorLabel::with_n_ms2(1, 1))?);
            let w = C64::new(1.0 / 2.0_f64.sqrt(), 0.0);
            let terms = vec![
                creation_string(4, &[0], w)?,  // f+_{1 up}
                creation_string(4, &[2], w)?,  // f+_{2 up}
            ];
            Ok(StateVector::from_terms(basis, &terms)?.fix_phase_first_nonzero())
        }
        AnalyticState::DissociatedH2 => {
            let basis = Arc::new(FockBasis::enumerate(4, SectorLabel::with_n_ms2(2, 0))?);
            let w = C64::new(1.0 / 2.0_f64.sqrt(), 0.0);
            let terms = vec![
                creation_string(4, &[0, 3], w)?,  // f+_{1u} f+_{2d}
                creation_string(4, &[1, 2], -w)?, // -f+_{1d} f+_{2u}
            ];
            Ok(StateVector::from_terms(basis, &terms)?.fix_phase_first_nonzero())
        }
        AnalyticState::HubbardDimer(params) => {
            let coeff = hubbard_dimer_coefficients(&params);
            let basis = Arc::new(FockBasis::enumerate(4, SectorLabel::with_n_ms2(2, 0))?);
            let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
            let a = C64::new(coeff.a * inv_sqrt2, 0.0);
            let b = C64::new(coeff.b * inv_sqrt2, 0.0);
            let terms = vec![
                creation_string(4, &[0, 3], a)?,  // f+_{1u} f+_{2d}
                creation_string(4, &[1, 2], -a)?, // -f+_{1d} f+_{2u}
                creation_string(4, &[0, 1], b)?,  // f+_{1u} f+_{1d}
                creation_string(4, &[3, 2], -b)?, // -f+_{2d} f+_{2u}
            ];
            Ok(StateVector::from_terms(basis, &terms)?.fix_phase_first_nonzero())
        }
    }
}

/// Resolve a creation-operator string (leftmost first, applied to vacuum)
/// into a signed `(configuration, amplitude)` term.
fn creation_string(
    mode_count: usize,
    modes_left_to_right: &[usize],
    coeff: C64,
) -> Result<(OccupationConfig, C64)> {
    let mut config = OccupationConfig::vacuum(mode_count);
    let mut phase = 1i32;
    for &mode in modes_left_to_right.iter().rev() {
        match apply_creation(config, mode)? {
            LadderOutcome::Mapped { config: c, phase: p } => {
                config = c;
                phase *= p as i32;
            }
            LadderOutcome::Annihilated => {
                return Err(crate::error::CoreError::InvalidInput(format!(
                    "creation string revisits mode {mode}"
                )))
            }
        }
    }
    Ok((config, coeff * C64::new(phase as f64, 0.0)))
}
