//! Two-particle occupation-number sector over the four single-particle
//! modes L↑, L↓, R↑, R↓, for bosons (10 states) and fermions (6 states).
//!
//! Basis vectors are |i j⟩ := c†_i c†_j |vac⟩ with i ≤ j in canonical mode
//! order (divided by √2 when i = j, bosons only). A no-label ket |X, Y⟩ is
//! c†_X c†_Y |vac⟩ with the operators written in argument order, so for
//! fermions |X, Y⟩ = −|Y, X⟩.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, real, CMatrix, CVector, ZERO};

/// Tolerance for algebraic identities and validity checks.
pub const TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Boson,
    Fermion,
}

impl Statistics {
    pub const ALL: [Statistics; 2] = [Statistics::Boson, Statistics::Fermion];

    /// Sign picked up when two creation operators are swapped.
    pub fn exchange_sign(self) -> f64 {
        match self {
            Statistics::Boson => 1.0,
            Statistics::Fermion => -1.0,
        }
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Statistics::Boson => "boson",
            Statistics::Fermion => "fermion",
        })
    }
}

impl FromStr for Statistics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "boson" | "bosons" | "bos" => Ok(Statistics::Boson),
            "fermion" | "fermions" | "fer" => Ok(Statistics::Fermion),
            _ => Err(Error::Parse {
                what: "statistics",
                input: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Spatial {
    L,
    R,
}

impl fmt::Display for Spatial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spatial::L => "L",
            Spatial::R => "R",
        })
    }
}

impl FromStr for Spatial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "L" | "l" => Ok(Spatial::L),
            "R" | "r" => Ok(Spatial::R),
            _ => Err(Error::Parse {
                what: "spatial mode",
                input: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pseudospin {
    Up,
    Down,
}

impl fmt::Display for Pseudospin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pseudospin::Up => "up",
            Pseudospin::Down => "down",
        })
    }
}

impl FromStr for Pseudospin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "up" | "u" => Ok(Pseudospin::Up),
            "down" | "d" => Ok(Pseudospin::Down),
            _ => Err(Error::Parse {
                what: "pseudospin",
                input: s.to_string(),
            }),
        }
    }
}

/// One of the four single-particle modes, linearly ordered
/// L↑ = 0, L↓ = 1, R↑ = 2, R↓ = 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeIndex {
    pub spatial: Spatial,
    pub pseudospin: Pseudospin,
}

impl ModeIndex {
    pub const L_UP: ModeIndex = ModeIndex::new(Spatial::L, Pseudospin::Up);
    pub const L_DOWN: ModeIndex = ModeIndex::new(Spatial::L, Pseudospin::Down);
    pub const R_UP: ModeIndex = ModeIndex::new(Spatial::R, Pseudospin::Up);
    pub const R_DOWN: ModeIndex = ModeIndex::new(Spatial::R, Pseudospin::Down);
    pub const ALL: [ModeIndex; 4] = [Self::L_UP, Self::L_DOWN, Self::R_UP, Self::R_DOWN];

    pub const fn new(spatial: Spatial, pseudospin: Pseudospin) -> Self {
        ModeIndex {
            spatial,
            pseudospin,
        }
    }

    pub fn index(self) -> usize {
        let s = match self.spatial {
            Spatial::L => 0,
            Spatial::R => 2,
        };
        let p = match self.pseudospin {
            Pseudospin::Up => 0,
            Pseudospin::Down => 1,
        };
        s + p
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arrow = match self.pseudospin {
            Pseudospin::Up => "↑",
            Pseudospin::Down => "↓",
        };
        write!(f, "{}{}", self.spatial, arrow)
    }
}

/// Occupation numbers of the four modes; always sums to 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occupation(pub [u8; 4]);

impl Occupation {
    /// The (i, j) pair of occupied mode indices with i ≤ j.
    pub fn modes(&self) -> (usize, usize) {
        let mut occupied = self
            .0
            .iter()
            .enumerate()
            .flat_map(|(i, &n)| std::iter::repeat_n(i, n as usize));
        let i = occupied.next().expect("two particles");
        let j = occupied.next().expect("two particles");
        (i, j)
    }

    /// Exactly one particle in each spatial mode.
    pub fn is_lr(&self) -> bool {
        self.0[0] + self.0[1] == 1
    }

    pub fn parity_class(&self) -> ParityClass {
        if self.is_lr() {
            ParityClass::LR
        } else {
            ParityClass::NO
        }
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a},{b},{c},{d})")
    }
}

/// Canonically ordered occupation basis of one statistics' sector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectorBasis {
    statistics: Statistics,
    states: Vec<Occupation>,
}

static BOSON_BASIS: Lazy<SectorBasis> = Lazy::new(|| SectorBasis::build(Statistics::Boson));
static FERMION_BASIS: Lazy<SectorBasis> = Lazy::new(|| SectorBasis::build(Statistics::Fermion));

impl SectorBasis {
    fn build(statistics: Statistics) -> Self {
        let max = match statistics {
            Statistics::Boson => 2,
            Statistics::Fermion => 1,
        };
        let mut states = Vec::new();
        for a in 0..=max {
            for b in 0..=max {
                for c in 0..=max {
                    for d in 0..=max {
                        if a + b + c + d == 2 {
                            states.push(Occupation([a, b, c, d]));
                        }
                    }
                }
            }
        }
        // lexicographically descending
        states.sort_by(|x, y| y.cmp(x));
        SectorBasis { statistics, states }
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn states(&self) -> &[Occupation] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index_of(&self, occ: &Occupation) -> Option<usize> {
        self.states.iter().position(|s| s == occ)
    }

    /// Index of the basis vector with particles in modes `i` and `j`.
    pub fn index_of_pair(&self, i: usize, j: usize) -> Option<usize> {
        let mut occ = [0u8; 4];
        occ[i] += 1;
        occ[j] += 1;
        self.index_of(&Occupation(occ))
    }
}

/// The canonical basis for `statistics`.
pub fn enumerate_basis(statistics: Statistics) -> &'static SectorBasis {
    match statistics {
        Statistics::Boson => &BOSON_BASIS,
        Statistics::Fermion => &FERMION_BASIS,
    }
}

/// c†_a c†_b |vac⟩ as (basis index, coefficient), or `None` when it vanishes.
pub fn pair_creation(a: usize, b: usize, statistics: Statistics) -> Option<(usize, Complex64)> {
    let basis = enumerate_basis(statistics);
    if a == b {
        return match statistics {
            Statistics::Boson => Some((basis.index_of_pair(a, a)?, real(std::f64::consts::SQRT_2))),
            Statistics::Fermion => None,
        };
    }
    let (i, j, sign) = if a < b {
        (a, b, 1.0)
    } else {
        (b, a, statistics.exchange_sign())
    };
    Some((basis.index_of_pair(i, j)?, real(sign)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ParityClass {
    /// One particle per spatial mode.
    LR,
    /// Both particles in the same spatial mode.
    NO,
}

/// The ten maximally entangled reference states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NamedLabel {
    #[serde(rename = "1-LR")]
    OneMinusLR,
    #[serde(rename = "1+LR")]
    OnePlusLR,
    #[serde(rename = "2-LR")]
    TwoMinusLR,
    #[serde(rename = "2+LR")]
    TwoPlusLR,
    #[serde(rename = "1-NO")]
    OneMinusNO,
    #[serde(rename = "1+NO")]
    OnePlusNO,
    #[serde(rename = "U-NO")]
    UMinusNO,
    #[serde(rename = "U+NO")]
    UPlusNO,
    #[serde(rename = "D-NO")]
    DMinusNO,
    #[serde(rename = "D+NO")]
    DPlusNO,
}

impl NamedLabel {
    pub const ALL: [NamedLabel; 10] = [
        NamedLabel::OneMinusLR,
        NamedLabel::OnePlusLR,
        NamedLabel::TwoMinusLR,
        NamedLabel::TwoPlusLR,
        NamedLabel::OneMinusNO,
        NamedLabel::OnePlusNO,
        NamedLabel::UMinusNO,
        NamedLabel::UPlusNO,
        NamedLabel::DMinusNO,
        NamedLabel::DPlusNO,
    ];

    pub fn parity_class(self) -> ParityClass {
        use NamedLabel::*;
        match self {
            OneMinusLR | OnePlusLR | TwoMinusLR | TwoPlusLR => ParityClass::LR,
            _ => ParityClass::NO,
        }
    }

    pub fn valid_for(self, statistics: Statistics) -> bool {
        use NamedLabel::*;
        statistics == Statistics::Boson || !matches!(self, UMinusNO | UPlusNO | DMinusNO | DPlusNO)
    }

    /// Labels that exist for `statistics`, in canonical order.
    pub fn for_statistics(statistics: Statistics) -> Vec<NamedLabel> {
        Self::ALL
            .iter()
            .copied()
            .filter(|l| l.valid_for(statistics))
            .collect()
    }

    pub fn as_str(self) -> &'static str {
        use NamedLabel::*;
        match self {
            OneMinusLR => "1-LR",
            OnePlusLR => "1+LR",
            TwoMinusLR => "2-LR",
            TwoPlusLR => "2+LR",
            OneMinusNO => "1-NO",
            OnePlusNO => "1+NO",
            UMinusNO => "U-NO",
            UPlusNO => "U+NO",
            DMinusNO => "D-NO",
            DPlusNO => "D+NO",
        }
    }

    /// Coefficients over no-label kets: (weight, first mode, second mode).
    fn terms(self) -> [(f64, ModeIndex, ModeIndex); 2] {
        use ModeIndex as M;
        use NamedLabel::*;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            OneMinusLR => [(h, M::L_UP, M::R_DOWN), (-h, M::L_DOWN, M::R_UP)],
            OnePlusLR => [(h, M::L_UP, M::R_DOWN), (h, M::L_DOWN, M::R_UP)],
            TwoMinusLR => [(h, M::L_UP, M::R_UP), (-h, M::L_DOWN, M::R_DOWN)],
            TwoPlusLR => [(h, M::L_UP, M::R_UP), (h, M::L_DOWN, M::R_DOWN)],
            OneMinusNO => [(h, M::L_UP, M::L_DOWN), (-h, M::R_UP, M::R_DOWN)],
            OnePlusNO => [(h, M::L_UP, M::L_DOWN), (h, M::R_UP, M::R_DOWN)],
            UMinusNO => [(0.5, M::L_UP, M::L_UP), (-0.5, M::R_UP, M::R_UP)],
            UPlusNO => [(0.5, M::L_UP, M::L_UP), (0.5, M::R_UP, M::R_UP)],
            DMinusNO => [(0.5, M::L_DOWN, M::L_DOWN), (-0.5, M::R_DOWN, M::R_DOWN)],
            DPlusNO => [(0.5, M::L_DOWN, M::L_DOWN), (0.5, M::R_DOWN, M::R_DOWN)],
        }
    }
}

impl fmt::Display for NamedLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NamedLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        Self::ALL
            .iter()
            .copied()
            .find(|l| l.as_str().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::Parse {
                what: "named state",
                input: s.to_string(),
            })
    }
}

/// Unit-norm state of two identical particles.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    statistics: Statistics,
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(statistics: Statistics, amplitudes: CVector) -> Result<Self> {
        let dim = enumerate_basis(statistics).dim();
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for a {dim}-dimensional {statistics} sector",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(StateVector {
            statistics,
            amplitudes,
        })
    }

    /// Normalizes `amplitudes` first; fails only on a zero vector.
    pub fn normalized(statistics: Statistics, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm < TOL {
            return Err(Error::NotNormalized(norm));
        }
        Self::new(statistics, amplitudes.unscale(norm))
    }

    pub(crate) fn from_raw(statistics: Statistics, amplitudes: CVector) -> Self {
        StateVector {
            statistics,
            amplitudes,
        }
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn basis(&self) -> &'static SectorBasis {
        enumerate_basis(self.statistics)
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, occ: &Occupation) -> Complex64 {
        self.basis()
            .index_of(occ)
            .map(|i| self.amplitudes[i])
            .unwrap_or(ZERO)
    }

    /// ⟨self|other⟩
    pub fn overlap(&self, other: &StateVector) -> Result<Complex64> {
        same_statistics(self.statistics, other.statistics)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_raw(
            self.statistics,
            &self.amplitudes * self.amplitudes.adjoint(),
        )
    }

    /// If `other = e^{iα} self` within `tol`, returns e^{iα}.
    pub fn phase_relative_to(&self, other: &StateVector, tol: f64) -> Option<Complex64> {
        let ov = self.overlap(other).ok()?;
        if (ov.norm() - 1.0).abs() > tol {
            return None;
        }
        let ph = ov / ov.norm();
        let diff = &other.amplitudes - &self.amplitudes * ph;
        (linalg::max_abs_vec(&diff) <= tol).then_some(ph)
    }

    /// Whether the state lies entirely inside one parity class.
    pub fn supported_in(&self, class: ParityClass) -> bool {
        self.basis()
            .states()
            .iter()
            .zip(self.amplitudes.iter())
            .all(|(occ, z)| occ.parity_class() == class || z.norm() <= TOL)
    }
}

fn same_statistics(a: Statistics, b: Statistics) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(format!(
            "{a} sector vs {b} sector"
        )));
    }
    Ok(())
}

/// One of the named maximally entangled states.
pub fn named_state(label: NamedLabel, statistics: Statistics) -> Result<StateVector> {
    if !label.valid_for(statistics) {
        return Err(Error::InvalidForStatistics { label, statistics });
    }
    let dim = enumerate_basis(statistics).dim();
    let mut amps = CVector::zeros(dim);
    for (w, a, b) in label.terms() {
        if let Some((idx, coeff)) = pair_creation(a.index(), b.index(), statistics) {
            amps[idx] += coeff * w;
        }
    }
    StateVector::new(statistics, amps)
}

/// One particle in `mode_a` and one in `mode_b`, i.e. the no-label ket
/// |mode_a, mode_b⟩, normalized.
pub fn product_state(
    mode_a: ModeIndex,
    mode_b: ModeIndex,
    statistics: Statistics,
) -> Result<StateVector> {
    let (idx, coeff) =
        pair_creation(mode_a.index(), mode_b.index(), statistics).ok_or(Error::PauliViolation)?;
    let mut amps = CVector::zeros(enumerate_basis(statistics).dim());
    amps[idx] = coeff / coeff.norm();
    StateVector::new(statistics, amps)
}

/// Π_LR or Π_NO on the sector.
pub fn projector(class: ParityClass, statistics: Statistics) -> CMatrix {
    let basis = enumerate_basis(statistics);
    let diag: Vec<Complex64> = basis
        .states()
        .iter()
        .map(|o| {
            if o.parity_class() == class {
                real(1.0)
            } else {
                ZERO
            }
        })
        .collect();
    CMatrix::from_diagonal(&CVector::from_vec(diag))
}

/// Hermitian, positive semidefinite, unit-trace operator on a sector.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    statistics: Statistics,
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(statistics: Statistics, matrix: CMatrix) -> Result<Self> {
        let rho = Self::from_raw(statistics, matrix);
        rho.validate(TOL)?;
        Ok(rho)
    }

    pub(crate) fn from_raw(statistics: Statistics, matrix: CMatrix) -> Self {
        DensityOperator { statistics, matrix }
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let dim = enumerate_basis(self.statistics).dim();
        if self.matrix.nrows() != dim || self.matrix.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix on a {dim}-dimensional sector",
                self.matrix.nrows(),
                self.matrix.ncols()
            )));
        }
        let herm = linalg::hermiticity_defect(&self.matrix);
        if herm > tol {
            return Err(Error::NotDensityOperator(format!(
                "not Hermitian ({herm:e})"
            )));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > tol {
            return Err(Error::NotDensityOperator(format!("trace {tr}")));
        }
        let min = self.min_eigenvalue();
        if min < -tol {
            return Err(Error::NotDensityOperator(format!("eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// Σ wᵢ |ψᵢ⟩⟨ψᵢ|
    pub fn mixture(weights: &[f64], states: &[StateVector]) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} states",
                weights.len(),
                states.len()
            )));
        }
        let statistics = states[0].statistics;
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > TOL || weights.iter().any(|w| *w < -TOL) {
            return Err(Error::InvalidProbability(total));
        }
        let dim = enumerate_basis(statistics).dim();
        let mut m = CMatrix::zeros(dim, dim);
        for (w, s) in weights.iter().zip(states) {
            same_statistics(statistics, s.statistics)?;
            m += s.density().matrix * real(*w);
        }
        Self::new(statistics, m)
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn basis(&self) -> &'static SectorBasis {
        enumerate_basis(self.statistics)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }

    /// Tr ρ²
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::hermitian_eigenvalues(&self.matrix)
            .first()
            .copied()
            .unwrap_or(0.0)
    }

    /// ⟨ψ|ρ|ψ⟩
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        same_statistics(self.statistics, psi.statistics)?;
        Ok(psi.amplitudes.dotc(&(&self.matrix * &psi.amplitudes)).re)
    }

    /// Uhlmann fidelity (Tr √(√ρ σ √ρ))², in [0, 1].
    pub fn fidelity(&self, other: &DensityOperator) -> Result<f64> {
        same_statistics(self.statistics, other.statistics)?;
        let s = linalg::psd_sqrt(&self.matrix);
        let inner = &s * &other.matrix * &s;
        let f = linalg::trace(&linalg::psd_sqrt(&inner)).re;
        Ok((f * f).clamp(0.0, 1.0))
    }

    /// max |ρ − Π ρ Π| for the projector of `class`.
    pub fn leakage_outside(&self, class: ParityClass) -> f64 {
        let p = projector(class, self.statistics);
        linalg::max_abs(&(&self.matrix - &p * &self.matrix * &p))
    }

    pub fn max_abs_diff(&self, other: &DensityOperator) -> f64 {
        if self.statistics != other.statistics {
            return f64::INFINITY;
        }
        linalg::max_abs(&(&self.matrix - &other.matrix))
    }
}
