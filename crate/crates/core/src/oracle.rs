//! First-quantized cross-check.
//!
//! Two labeled particles live in C⁴ ⊗ C⁴ (index 4·m₁ + m₂). Sector states are
//! embedded by the isometry V that sends the occupation basis vector of
//! modes i < j to (|i⟩|j⟩ ± |j⟩|i⟩)/√2 and a bosonic double occupancy of i
//! to |i⟩|i⟩. Operators lift as V†(U ⊗ U)V. Nothing here touches the
//! creation-operator algebra used by [`crate::elements::lift`].

use std::f64::consts::FRAC_1_SQRT_2;

use crate::elements::SingleParticleUnitary;
use crate::error::{Error, Result};
use crate::fock::{enumerate_basis, ModeIndex, StateVector, Statistics, TOL};
use crate::linalg::{self, real, CMatrix, CVector};

/// Deviation allowed when checking the exchange symmetry of a labeled state.
pub const SECTOR_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledState {
    pub amplitudes: CVector,
}

fn labeled_index(first: usize, second: usize) -> usize {
    4 * first + second
}

fn exchange_sign(statistics: Statistics) -> f64 {
    match statistics {
        Statistics::Boson => 1.0,
        Statistics::Fermion => -1.0,
    }
}

/// Particle exchange |a⟩|b⟩ → |b⟩|a⟩.
pub fn swap_operator() -> CMatrix {
    let mut s = CMatrix::zeros(16, 16);
    for a in 0..4 {
        for b in 0..4 {
            s[(labeled_index(b, a), labeled_index(a, b))] = real(1.0);
        }
    }
    s
}

/// (|a⟩|b⟩ ± |b⟩|a⟩)/norm, or |a⟩|a⟩ for two bosons in the same mode.
pub fn symmetrize(
    mode_a: ModeIndex,
    mode_b: ModeIndex,
    statistics: Statistics,
) -> Result<LabeledState> {
    let (a, b) = (mode_a.index(), mode_b.index());
    let mut v = CVector::zeros(16);
    if a == b {
        if statistics == Statistics::Fermion {
            return Err(Error::PauliViolation);
        }
        v[labeled_index(a, a)] = real(1.0);
    } else {
        v[labeled_index(a, b)] = real(FRAC_1_SQRT_2);
        v[labeled_index(b, a)] = real(exchange_sign(statistics) * FRAC_1_SQRT_2);
    }
    Ok(LabeledState { amplitudes: v })
}

/// The 16 × dim isometry from the sector onto the (anti)symmetric subspace.
pub fn sector_isometry(statistics: Statistics) -> CMatrix {
    let basis = enumerate_basis(statistics);
    let mut v = CMatrix::zeros(16, basis.dim());
    for (col, occ) in basis.states().iter().enumerate() {
        let (i, j) = occ.modes();
        if i == j {
            v[(labeled_index(i, i), col)] = real(1.0);
        } else {
            v[(labeled_index(i, j), col)] = real(FRAC_1_SQRT_2);
            v[(labeled_index(j, i), col)] = real(exchange_sign(statistics) * FRAC_1_SQRT_2);
        }
    }
    v
}

/// Deviation of `ls` from the exchange eigenspace of `statistics`.
pub fn symmetry_defect(ls: &LabeledState, statistics: Statistics) -> f64 {
    let swapped = swap_operator() * &ls.amplitudes;
    linalg::max_abs_vec(&(swapped - &ls.amplitudes * real(exchange_sign(statistics))))
}

pub fn to_occupation(ls: &LabeledState, statistics: Statistics) -> Result<StateVector> {
    let defect = symmetry_defect(ls, statistics);
    if defect > SECTOR_TOL {
        return Err(Error::WrongSymmetrySector(defect));
    }
    let v = sector_isometry(statistics);
    StateVector::new(statistics, v.adjoint() * &ls.amplitudes)
}

pub fn from_occupation(psi: &StateVector) -> LabeledState {
    LabeledState {
        amplitudes: sector_isometry(psi.statistics()) * psi.amplitudes(),
    }
}

/// V†(U ⊗ U)V
pub fn lift_oracle(u: &SingleParticleUnitary, statistics: Statistics) -> Result<CMatrix> {
    let defect = linalg::unitarity_defect(u.matrix());
    if defect > TOL {
        return Err(Error::NotUnitary(defect));
    }
    let v = sector_isometry(statistics);
    let uu = linalg::kron(u.matrix(), u.matrix());
    Ok(v.adjoint() * uu * v)
}

/// max |(I − VV†)(U ⊗ U)V|: amplitude pushed out of the symmetry sector.
pub fn sector_leakage(u: &SingleParticleUnitary, statistics: Statistics) -> f64 {
    let v = sector_isometry(statistics);
    let p = &v * v.adjoint();
    let uu = linalg::kron(u.matrix(), u.matrix());
    linalg::max_abs(&((CMatrix::identity(16, 16) - p) * uu * v))
}
