//! Hubbard chains and the analytically solvable two-site dimer.

use std::sync::Arc;

use crate::error::{CoreError, Result};
use crate::fock::FockBasis;

use super::{IntegralSet, OperatorBuilder, SparseOperator};
use super::{LadderKind::Annihilate, LadderKind::Create};

/// Parameters of a Hubbard chain with open boundaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HubbardParams {
    /// Hopping amplitude `t > 0`.
    pub hopping: f64,
    /// On-site repulsion `U >= 0`.
    pub repulsion: f64,
    /// Number of sites (2 for the dimer).
    pub site_count: usize,
}

impl HubbardParams {
    pub fn new(hopping: f64, repulsion: f64, site_count: usize) -> Result<Self> {
        if !(hopping > 0.0) {
            return Err(CoreError::InvalidInput(format!(
                "hopping must be positive, got {hopping}"
            )));
        }
        if repulsion < 0.0 {
            return Err(CoreError::InvalidInput(format!(
                "repulsion must be nonnegative, got {repulsion}"
            )));
        }
        if site_count < 2 {
            return Err(CoreError::InvalidInput(format!(
                "need at least 2 sites, got {site_count}"
            )));
        }
        Ok(HubbardParams {
            hopping,
            repulsion,
            site_count,
        })
    }

    /// The two-site dimer.
    pub fn dimer(hopping: f64, repulsion: f64) -> Result<Self> {
        HubbardParams::new(hopping, repulsion, 2)
    }
}

/// Ground-state coefficients of the half-filled Hubbard dimer singlet:
/// `a` weights the covalent part, `b` the ionic part, and
/// `W = sqrt(U^2/4 + 4 t^2)` sets the ground energy `U/2 - W`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HubbardDimerCoefficients {
    pub a: f64,
    pub b: f64,
    pub w: f64,
}

impl HubbardDimerCoefficients {
    /// Ground energy of the dimer in the half-filled singlet sector.
    pub fn ground_energy(&self, params: &HubbardParams) -> f64 {
        params.repulsion / 2.0 - self.w
    }
}

/// Closed-form dimer coefficients:
/// `a = sqrt((W + U/2) / 2W)`, `b = 2t / sqrt(2W (W + U/2))`.
pub fn hubbard_dimer_coefficients(params: &HubbardParams) -> HubbardDimerCoefficients {
    let t = params.hopping;
    let u = params.repulsion;
    let w = (u * u / 4.0 + 4.0 * t * t).sqrt();
    let a = ((w + u / 2.0) / (2.0 * w)).sqrt();
    let b = 2.0 * t / (2.0 * w * (w + u / 2.0)).sqrt();
    HubbardDimerCoefficients { a, b, w }
}

/// Hubbard Hamiltonian on `basis`: nearest-neighbor hopping `-t` per spin
/// plus `U n_up n_down` per site, assembled directly from ladder operators.
pub fn hubbard_hamiltonian(
    params: &HubbardParams,
    basis: &Arc<FockBasis>,
) -> Result<SparseOperator> {
    if basis.mode_count() != 2 * params.site_count {
        return Err(CoreError::DimensionMismatch(format!(
            "basis has {} modes, chain with {} sites requires {}",
            basis.mode_count(),
            params.site_count,
            2 * params.site_count
        )));
    }
    let mut builder = OperatorBuilder::new(basis);
    for col in 0..basis.dim() {
        for site in 0..params.site_count - 1 {
            for spin in 0..2 {
                let here = 2 * site + spin;
                let there = 2 * (site + 1) + spin;
                // -t (c+_i c_j + c+_j c_i)
                builder.add_string(
                    col,
                    -params.hopping,
                    &[(Annihilate, there), (Create, here)],
                )?;
                builder.add_string(
                    col,
                    -params.hopping,
                    &[(Annihilate, here), (Create, there)],
                )?;
            }
        }
        if params.repulsion != 0.0 {
            let config = basis.config(col);
            let mut doubly = 0u32;
            for site in 0..params.site_count {
                if config.occupied(2 * site) && config.occupied(2 * site + 1) {
                    doubly += 1;
                }
            }
            if doubly > 0 {
                builder.add_string(col, params.repulsion * doubly as f64, &[])?;
            }
        }
    }
    let op = builder.finish(Arc::clone(basis));
    op.check_hermitian(1e-12)?;
    Ok(op)
}

/// The same chain expressed as an [`IntegralSet`]: `T_{i,i+1} = -t`,
/// `(ii|ii) = U`. Useful for exercising the generic assembly path.
pub fn hubbard_integral_set(params: &HubbardParams, electron_count: u32, ms2: i32) -> IntegralSet {
    let mut ints = IntegralSet::zero(params.site_count, electron_count, ms2);
    for site in 0..params.site_count - 1 {
        ints.set_t(site, site + 1, -params.hopping);
    }
    if params.repulsion != 0.0 {
        for site in 0..params.site_count {
            ints.set_v(site, site, site, site, params.repulsion);
        }
    }
    ints
}
