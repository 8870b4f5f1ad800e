//! Occupation-number representation of fermionic Fock space.
//!
//! Modes are spin-orbitals in orbital-major order: mode `2*o` is the spin-up
//! mode of orbital `o`, mode `2*o + 1` its spin-down partner. A configuration
//! `|n_1, ..., n_D>` is the creation string `(f_1^+)^{n_1} ... (f_D^+)^{n_D}`
//! applied to the vacuum, so every sign in the crate follows from this single
//! global mode order.
//!
//! Configurations are stored as machine-word bit patterns (bit `k` = mode `k`,
//! `D <= 64`), which makes the fermionic phase of a ladder operator a
//! population count over the lower bits.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{CoreError, Result};
use crate::C64;

/// Maximum number of spin-orbital modes (one machine word of occupation bits).
pub const MAX_MODES: usize = 64;

/// Largest basis the sector enumerator is willing to materialize.
const MAX_BASIS_DIM: u128 = 1 << 22;

/// Norm tolerance enforced on state vectors after construction.
pub const STATE_NORM_TOL: f64 = 1e-12;

/// Fermion-number parity of a configuration or sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Parity of a particle count.
    pub fn of_count(n: u32) -> Self {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Spin projection of a single mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

/// Mode index of `(orbital, spin)` under the global orbital-major order.
pub fn mode_index(orbital: usize, spin: Spin) -> usize {
    2 * orbital
        + match spin {
            Spin::Up => 0,
            Spin::Down => 1,
        }
}

/// A single occupation pattern over `D` spin-orbital modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OccupationConfig {
    bits: u64,
    mode_count: usize,
}

impl OccupationConfig {
    /// The vacuum configuration (all modes empty).
    pub fn vacuum(mode_count: usize) -> Self {
        debug_assert!(mode_count <= MAX_MODES);
        OccupationConfig {
            bits: 0,
            mode_count,
        }
    }

    /// Build a configuration from a raw bit pattern (bit `k` = mode `k`).
    pub fn from_bits(mode_count: usize, bits: u64) -> Self {
        debug_assert!(mode_count <= MAX_MODES);
        debug_assert!(mode_count == MAX_MODES || bits < (1u64 << mode_count));
        OccupationConfig { bits, mode_count }
    }

    /// Build a configuration occupying exactly the listed modes.
    pub fn from_occupied_modes(mode_count: usize, modes: &[usize]) -> Result<Self> {
        let mut bits = 0u64;
        for &m in modes {
            if m >= mode_count {
                return Err(CoreError::ModeOutOfRange {
                    mode: m,
                    mode_count,
                });
            }
            bits |= 1u64 << m;
        }
        Ok(OccupationConfig { bits, mode_count })
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn occupied(&self, mode: usize) -> bool {
        debug_assert!(mode < self.mode_count);
        self.bits >> mode & 1 == 1
    }

    /// Total particle number of the configuration.
    pub fn particle_count(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Twice the total spin projection, `2M = N_up - N_down`.
    pub fn ms2(&self) -> i32 {
        let up = (self.bits & UP_MASK).count_ones() as i32;
        let down = (self.bits & !UP_MASK).count_ones() as i32;
        up - down
    }

    /// Fermion-number parity.
    pub fn parity(&self) -> Parity {
        Parity::of_count(self.particle_count())
    }

    /// Occupied modes with index strictly below `mode`; the exponent of the
    /// fermionic phase picked up by a ladder operator on `mode`.
    pub fn count_below(&self, mode: usize) -> u32 {
        let mask = (1u64 << mode) - 1;
        (self.bits & mask).count_ones()
    }

    /// Occupied mode indices in ascending order.
    pub fn occupied_modes(&self) -> Vec<usize> {
        (0..self.mode_count).filter(|&m| self.occupied(m)).collect()
    }
}

/// Spin-up modes are the even ones.
const UP_MASK: u64 = {
    let mut mask = 0u64;
    let mut k = 0;
    while k < 64 {
        mask |= 1u64 << k;
        k += 2;
    }
    mask
};

impl fmt::Display for OccupationConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for m in 0..self.mode_count {
            write!(f, "{}", if self.occupied(m) { '1' } else { '0' })?;
        }
        write!(f, ">")
    }
}

/// Outcome of a single creation or annihilation operator on a configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LadderOutcome {
    /// The operator maps the configuration to another one, up to a sign.
    Mapped {
        config: OccupationConfig,
        phase: i8,
    },
    /// The operator annihilates the configuration (Pauli exclusion or empty mode).
    Annihilated,
}

/// Apply `f_mode^+`. The phase is `(-1)^(occupied modes below `mode`)`.
pub fn apply_creation(config: OccupationConfig, mode: usize) -> Result<LadderOutcome> {
    if mode >= config.mode_count {
        return Err(CoreError::ModeOutOfRange {
            mode,
            mode_count: config.mode_count,
        });
    }
    if config.occupied(mode) {
        return Ok(LadderOutcome::Annihilated);
    }
    let phase = if config.count_below(mode) % 2 == 0 {
        1
    } else {
        -1
    };
    Ok(LadderOutcome::Mapped {
        config: OccupationConfig {
            bits: config.bits | 1u64 << mode,
            mode_count: config.mode_count,
        },
        phase,
    })
}

/// Apply `f_mode`; mirror of [`apply_creation`] with the same phase rule.
pub fn apply_annihilation(config: OccupationConfig, mode: usize) -> Result<LadderOutcome> {
    if mode >= config.mode_count {
        return Err(CoreError::ModeOutOfRange {
            mode,
            mode_count: config.mode_count,
        });
    }
    if !config.occupied(mode) {
        return Ok(LadderOutcome::Annihilated);
    }
    let phase = if config.count_below(mode) % 2 == 0 {
        1
    } else {
        -1
    };
    Ok(LadderOutcome::Mapped {
        config: OccupationConfig {
            bits: config.bits & !(1u64 << mode),
            mode_count: config.mode_count,
        },
        phase,
    })
}

/// Symmetry sector: particle number, magnetization and/or parity, each
/// optionally unconstrained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SectorLabel {
    /// Total particle number `N`, if constrained.
    pub particle_count: Option<u32>,
    /// Twice the total spin projection, `2M`, if constrained.
    pub ms2: Option<i32>,
    /// Fermion-number parity, if constrained.
    pub parity: Option<Parity>,
}

impl SectorLabel {
    pub fn unconstrained() -> Self {
        SectorLabel {
            particle_count: None,
            ms2: None,
            parity: None,
        }
    }

    /// Fixed particle number, free magnetization.
    pub fn with_n(n: u32) -> Self {
        SectorLabel {
            particle_count: Some(n),
            ms2: None,
            parity: None,
        }
    }

    /// Fixed particle number and magnetization (`ms2 = 2M`).
    pub fn with_n_ms2(n: u32, ms2: i32) -> Self {
        SectorLabel {
            particle_count: Some(n),
            ms2: Some(ms2),
            parity: None,
        }
    }

    /// Check internal consistency: a constrained parity must match a
    /// constrained particle number.
    pub fn validate(&self) -> Result<()> {
        if let (Some(n), Some(p)) = (self.particle_count, self.parity) {
            if Parity::of_count(n) != p {
                return Err(CoreError::InvalidSector(format!(
                    "parity {:?} is inconsistent with particle count {}",
                    p, n
                )));
            }
        }
        Ok(())
    }

    /// Does `config` belong to this sector?
    pub fn admits(&self, config: &OccupationConfig) -> bool {
        if let Some(n) = self.particle_count {
            if config.particle_count() != n {
                return false;
            }
        }
        if let Some(ms2) = self.ms2 {
            if config.ms2() != ms2 {
                return false;
            }
        }
        if let Some(p) = self.parity {
            if config.parity() != p {
                return false;
            }
        }
        true
    }

    fn describe(&self) -> String {
        format!(
            "N={}, 2M={}, parity={}",
            self.particle_count
                .map_or("any".to_string(), |n| n.to_string()),
            self.ms2.map_or("any".to_string(), |m| m.to_string()),
            self.parity.map_or("any".to_string(), |p| format!("{p:?}")),
        )
    }
}

/// An ordered occupation-number basis of a (sector-restricted) Fock space.
///
/// Configurations are strictly ordered by ascending bit pattern, which pins
/// the index of every configuration across runs and platforms.
#[derive(Debug, Clone)]
pub struct FockBasis {
    configs: Vec<OccupationConfig>,
    index: HashMap<u64, usize>,
    sector: SectorLabel,
    mode_count: usize,
}

impl FockBasis {
    /// Enumerate exactly the configurations of `sector` over `mode_count` modes.
    ///
    /// `mode_count` must be even (spin-orbitals come in up/down pairs) and at
    /// most [`MAX_MODES`]. An empty sector is an error.
    pub fn enumerate(mode_count: usize, sector: SectorLabel) -> Result<Self> {
        if mode_count < 2 || mode_count > MAX_MODES || mode_count % 2 != 0 {
            return Err(CoreError::InvalidInput(format!(
                "mode count must be even and in [2, {MAX_MODES}], got {mode_count}"
            )));
        }
        sector.validate()?;

        let mut bits: Vec<u64> = match (sector.particle_count, sector.ms2) {
            (Some(n), Some(ms2)) => {
                let d = mode_count / 2;
                let n = n as i64;
                let ms2 = ms2 as i64;
                if (n + ms2) % 2 != 0 {
                    Vec::new()
                } else {
                    let n_up = (n + ms2) / 2;
                    let n_down = (n - ms2) / 2;
                    if n_up < 0 || n_down < 0 || n_up > d as i64 || n_down > d as i64 {
                        Vec::new()
                    } else {
                        check_dim(
                            mode_count,
                            binomial(d, n_up as usize) * binomial(d, n_down as usize),
                        )?;
                        let ups = spin_patterns(d, n_up as usize, 0);
                        let downs = spin_patterns(d, n_down as usize, 1);
                        let mut v = Vec::with_capacity(ups.len() * downs.len());
                        for &u in &ups {
                            for &w in &downs {
                                v.push(u | w);
                            }
                        }
                        v
                    }
                }
            }
            (Some(n), None) => {
                if n as usize > mode_count {
                    Vec::new()
                } else {
                    check_dim(mode_count, binomial(mode_count, n as usize))?;
                    combinations(mode_count, n as usize)
                }
            }
            (None, _) => {
                // No particle-number handle: scan the full space.
                if mode_count > 24 {
                    return Err(CoreError::BasisTooLarge {
                        mode_count,
                        dim: 1u128 << mode_count,
                    });
                }
                (0u64..1u64 << mode_count).collect()
            }
        };

        bits.retain(|&b| sector.admits(&OccupationConfig::from_bits(mode_count, b)));
        bits.sort_unstable();
        if bits.is_empty() {
            return Err(CoreError::EmptySector(sector.describe()));
        }

        let configs: Vec<OccupationConfig> = bits
            .iter()
            .map(|&b| OccupationConfig::from_bits(mode_count, b))
            .collect();
        let index = bits.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        Ok(FockBasis {
            configs,
            index,
            sector,
            mode_count,
        })
    }

    /// The full Fock space over `mode_count` modes.
    pub fn unconstrained(mode_count: usize) -> Result<Self> {
        FockBasis::enumerate(mode_count, SectorLabel::unconstrained())
    }

    /// The local Fock space of a mode subset: all `2^mode_count` patterns.
    ///
    /// Unlike [`FockBasis::enumerate`] this accepts any mode count from 0
    /// (the scalar space of an empty subset) up to 24, including odd ones;
    /// reduced density matrices live on such spaces.
    pub fn full(mode_count: usize) -> Result<Self> {
        if mode_count > 24 {
            return Err(CoreError::BasisTooLarge {
                mode_count,
                dim: 1u128 << mode_count,
            });
        }
        let configs: Vec<OccupationConfig> = (0u64..1u64 << mode_count)
            .map(|b| OccupationConfig::from_bits(mode_count, b))
            .collect();
        let index = configs
            .iter()
            .enumerate()
            .map(|(i, c)| (c.bits(), i))
            .collect();
        Ok(FockBasis {
            configs,
            index,
            sector: SectorLabel::unconstrained(),
            mode_count,
        })
    }

    pub fn dim(&self) -> usize {
        self.configs.len()
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn sector(&self) -> &SectorLabel {
        &self.sector
    }

    pub fn config(&self, i: usize) -> OccupationConfig {
        self.configs[i]
    }

    pub fn configs(&self) -> &[OccupationConfig] {
        &self.configs
    }

    /// Index of a configuration in this basis, if present.
    pub fn index_of(&self, config: &OccupationConfig) -> Option<usize> {
        debug_assert_eq!(config.mode_count(), self.mode_count);
        self.index.get(&config.bits()).copied()
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

fn check_dim(mode_count: usize, dim: u128) -> Result<()> {
    if dim > MAX_BASIS_DIM {
        Err(CoreError::BasisTooLarge { mode_count, dim })
    } else {
        Ok(())
    }
}

/// All bit patterns with `k` of `n` bits set.
fn combinations(n: usize, k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    if k == 0 {
        out.push(0);
        return out;
    }
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().fold(0u64, |b, &i| b | 1u64 << i));
        // Advance to the next combination in lexicographic order.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Patterns occupying `k` of the `d` modes with spin offset `parity_bit`
/// (0 selects spin-up modes `0, 2, 4, ...`; 1 the spin-down ones).
fn spin_patterns(d: usize, k: usize, parity_bit: usize) -> Vec<u64> {
    combinations(d, k)
        .into_iter()
        .map(|c| {
            let mut bits = 0u64;
            for o in 0..d {
                if c >> o & 1 == 1 {
                    bits |= 1u64 << (2 * o + parity_bit);
                }
            }
            bits
        })
        .collect()
}

/// A normalized pure state over a [`FockBasis`].
#[derive(Debug, Clone)]
pub struct StateVector {
    basis: Arc<FockBasis>,
    amplitudes: DVector<C64>,
}

impl StateVector {
    /// Wrap amplitudes over `basis`, normalizing to unit Euclidean norm.
    pub fn new(basis: Arc<FockBasis>, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(CoreError::DimensionMismatch(format!(
                "{} amplitudes for a basis of dimension {}",
                amplitudes.len(),
                basis.dim()
            )));
        }
        let norm = amplitudes.norm();
        if norm < STATE_NORM_TOL {
            return Err(CoreError::InvalidInput(
                "state vector has vanishing norm".into(),
            ));
        }
        Ok(StateVector {
            basis,
            amplitudes: amplitudes / C64::new(norm, 0.0),
        })
    }

    /// Build a state from sparse `(configuration, amplitude)` terms.
    pub fn from_terms(basis: Arc<FockBasis>, terms: &[(OccupationConfig, C64)]) -> Result<Self> {
        let mut amps = DVector::<C64>::zeros(basis.dim());
        for (config, amp) in terms {
            let idx = basis.index_of(config).ok_or_else(|| {
                CoreError::InvalidInput(format!("configuration {config} not in basis"))
            })?;
            amps[idx] += *amp;
        }
        StateVector::new(basis, amps)
    }

    /// A single configuration state.
    pub fn configuration(basis: Arc<FockBasis>, config: OccupationConfig) -> Result<Self> {
        StateVector::from_terms(basis, &[(config, C64::new(1.0, 0.0))])
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, i: usize) -> C64 {
        self.amplitudes[i]
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// Rotate the global phase so the first amplitude above `1e-12` is real
    /// positive. Makes analytically constructed states comparable.
    pub fn fix_phase_first_nonzero(mut self) -> Self {
        if let Some(a) = self.amplitudes.iter().find(|a| a.norm() > 1e-12) {
            let rot = a.conj() / a.norm();
            self.amplitudes *= rot;
        }
        self
    }

    /// Rotate the global phase so the largest-magnitude amplitude (smallest
    /// index on ties) is real positive.
    pub fn fix_phase_largest(mut self) -> Self {
        let mut best = 0usize;
        for i in 1..self.amplitudes.len() {
            if self.amplitudes[i].norm() > self.amplitudes[best].norm() + 1e-15 {
                best = i;
            }
        }
        let a = self.amplitudes[best];
        if a.norm() > 1e-15 {
            let rot = a.conj() / a.norm();
            self.amplitudes *= rot;
        }
        self
    }

    /// Particle number of the state, if the basis sector fixes one.
    pub fn particle_count(&self) -> Option<u32> {
        self.basis.sector().particle_count.or_else(|| {
            let n = self.basis.config(0).particle_count();
            self.basis
                .configs()
                .iter()
                .all(|c| c.particle_count() == n)
                .then_some(n)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(d: usize, bits: u64) -> OccupationConfig {
        OccupationConfig::from_bits(d, bits)
    }

    #[test]
    fn sector_counts_match_direct_enumeration() {
        // D=4, N=1: one particle in any of 4 modes.
        let b = FockBasis::enumerate(4, SectorLabel::with_n(1)).unwrap();
        assert_eq!(b.dim(), 4);

        // D=2 unconstrained: the full 4-dimensional Fock space.
        let b = FockBasis::unconstrained(2).unwrap();
        assert_eq!(b.dim(), 4);
    }

    #[test]
    fn half_filled_m0_sector_matches_exhaustive_oracle() {
        // Oracle: filter all 2^4 patterns by hand.
        let sector = SectorLabel::with_n_ms2(2, 0);
        let expected: Vec<u64> = (0u64..16)
            .filter(|&bits| {
                let c = cfg(4, bits);
                c.particle_count() == 2 && c.ms2() == 0
            })
            .collect();
        let b = FockBasis::enumerate(4, sector).unwrap();
        let got: Vec<u64> = b.configs().iter().map(|c| c.bits()).collect();
        assert_eq!(got, expected);
        assert_eq!(b.dim(), 4);
        // {1up 1down, 1down 2up, 1up 2down, 2up 2down} as bit patterns.
        assert_eq!(got, vec![0b0011, 0b0110, 0b1001, 0b1100]);
    }

    #[test]
    fn empty_sector_is_an_error() {
        let err = FockBasis::enumerate(4, SectorLabel::with_n(5)).unwrap_err();
        assert!(matches!(err, CoreError::EmptySector(_)));
    }

    #[test]
    fn inconsistent_parity_is_rejected() {
        let sector = SectorLabel {
            particle_count: Some(2),
            ms2: None,
            parity: Some(Parity::Odd),
        };
        assert!(matches!(
            FockBasis::enumerate(4, sector),
            Err(CoreError::InvalidSector(_))
        ));
    }

    #[test]
    fn creation_phases_follow_mode_order() {
        let vac = OccupationConfig::vacuum(4);
        // f+_{1up} on vacuum: no occupied mode below, phase +1.
        let out = apply_creation(vac, 0).unwrap();
        assert_eq!(
            out,
            LadderOutcome::Mapped {
                config: cfg(4, 0b0001),
                phase: 1
            }
        );

        // f+_{2down} on |1up>: one occupied mode below mode 3, phase -1.
        // Oracle: normal-ordering f+_3 f+_0 |vac> = -f+_0 f+_3 |vac>.
        let out = apply_creation(cfg(4, 0b0001), 3).unwrap();
        assert_eq!(
            out,
            LadderOutcome::Mapped {
                config: cfg(4, 0b1001),
                phase: -1
            }
        );

        // Pauli exclusion.
        let out = apply_creation(cfg(4, 0b0001), 0).unwrap();
        assert_eq!(out, LadderOutcome::Annihilated);
    }

    #[test]
    fn annihilation_mirrors_creation() {
        let out = apply_annihilation(cfg(4, 0b0001), 0).unwrap();
        assert_eq!(
            out,
            LadderOutcome::Mapped {
                config: OccupationConfig::vacuum(4),
                phase: 1
            }
        );

        // Adjoint of the signed creation example.
        let out = apply_annihilation(cfg(4, 0b1001), 3).unwrap();
        assert_eq!(
            out,
            LadderOutcome::Mapped {
                config: cfg(4, 0b0001),
                phase: -1
            }
        );

        // Empty mode.
        let out = apply_annihilation(cfg(4, 0b0001), 2).unwrap();
        assert_eq!(out, LadderOutcome::Annihilated);
    }

    #[test]
    fn mode_out_of_range_is_an_error() {
        let vac = OccupationConfig::vacuum(4);
        assert!(matches!(
            apply_creation(vac, 4),
            Err(CoreError::ModeOutOfRange { .. })
        ));
    }

    proptest! {
        #[test]
        fn create_then_annihilate_cancels_phases(bits in 0u64..256, mode in 0usize..8) {
            let c = cfg(8, bits);
            if !c.occupied(mode) {
                let LadderOutcome::Mapped { config, phase } = apply_creation(c, mode).unwrap() else {
                    panic!("unoccupied mode must be mappable");
                };
                let LadderOutcome::Mapped { config: back, phase: phase2 } =
                    apply_annihilation(config, mode).unwrap() else {
                    panic!("occupied mode must be mappable");
                };
                prop_assert_eq!(back, c);
                prop_assert_eq!(phase * phase2, 1);
            }
        }

        #[test]
        fn creation_operators_anticommute(bits in 0u64..256, a in 0usize..8, b in 0usize..8) {
            let c = cfg(8, bits);
            if a != b && !c.occupied(a) && !c.occupied(b) {
                let ab = compose(c, a, b);
                let ba = compose(c, b, a);
                prop_assert_eq!(ab.0, ba.0);
                prop_assert_eq!(ab.1, -ba.1);
            }
        }

        #[test]
        fn sector_bases_partition_the_full_space(d in 1usize..4) {
            let modes = 2 * d;
            let full = FockBasis::unconstrained(modes).unwrap();
            let mut seen = std::collections::HashSet::new();
            for n in 0..=modes as u32 {
                for ms2 in -(modes as i32)..=(modes as i32) {
                    if let Ok(b) = FockBasis::enumerate(modes, SectorLabel::with_n_ms2(n, ms2)) {
                        for c in b.configs() {
                            prop_assert!(seen.insert(c.bits()), "duplicate config across sectors");
                        }
                    }
                }
            }
            prop_assert_eq!(seen.len(), full.dim());
        }
    }

    /// Apply `f+_b` then `f+_a` (operator string `f+_a f+_b`).
    fn compose(c: OccupationConfig, a: usize, b: usize) -> (OccupationConfig, i8) {
        let LadderOutcome::Mapped { config, phase } = apply_creation(c, b).unwrap() else {
            panic!()
        };
        let LadderOutcome::Mapped {
            config: c2,
            phase: p2,
        } = apply_creation(config, a).unwrap()
        else {
            panic!()
        };
        (c2, phase * p2)
    }

    #[test]
    fn state_vector_normalizes_and_fixes_phase() {
        let basis = Arc::new(FockBasis::unconstrained(2).unwrap());
        let amps = DVector::from_vec(vec![
            C64::new(0.0, 0.0),
            C64::new(0.0, -2.0),
            C64::new(2.0, 0.0),
            C64::new(0.0, 0.0),
        ]);
        let s = StateVector::new(basis, amps).unwrap().fix_phase_first_nonzero();
        assert!((s.amplitudes().norm() - 1.0).abs() < STATE_NORM_TOL);
        let a1 = s.amplitude(1);
        assert!(a1.im.abs() < 1e-14 && a1.re > 0.0);
    }
}
