//! Local noise on the pseudospin of each spatial mode.
//!
//! Channels act only on states with one particle per spatial mode. On that
//! four-dimensional block the occupation basis is the product basis
//! |σ_L σ_R⟩ (with ↑ as the excited level), since every LR basis vector is
//! c†_{Lσ} c†_{Rτ}|vac⟩ with no reordering sign.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    enumerate_basis, product_state, projector, DensityOperator, ModeIndex, ParityClass, Pseudospin,
    Spatial, StateVector, Statistics, TOL,
};
use crate::linalg::{c, real, CMatrix, ZERO};

/// Parameters of the Lorentzian bath. All rates in inverse time units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BathParams {
    pub gamma: f64,
    pub lambda: f64,
    pub omega0: f64,
}

impl Default for BathParams {
    fn default() -> Self {
        BathParams {
            gamma: 1.0,
            lambda: 1.0,
            omega0: 1.0,
        }
    }
}

impl BathParams {
    pub fn new(gamma: f64, lambda: f64, omega0: f64) -> Result<Self> {
        let bath = BathParams {
            gamma,
            lambda,
            omega0,
        };
        bath.validate()?;
        Ok(bath)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be > 0, got {}",
                self.gamma
            )));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be > 0, got {}",
                self.lambda
            )));
        }
        if !self.omega0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "omega0 must be finite, got {}",
                self.omega0
            )));
        }
        Ok(())
    }

    /// d² = 2γλ − λ²; negative in the overdamped regime.
    pub fn d_squared(&self) -> f64 {
        self.lambda * (2.0 * self.gamma - self.lambda)
    }

    /// d = √(2γλ − λ²), imaginary when 2γ < λ.
    pub fn d(&self) -> Complex64 {
        c(self.d_squared(), 0.0).sqrt()
    }
}

/// Lorentzian spectral density J(ω) = (γ/2π) λ² / ((ω − ω₀)² + λ²).
pub fn spectral_density(bath: &BathParams, omega: f64) -> f64 {
    let l2 = bath.lambda * bath.lambda;
    let dw = omega - bath.omega0;
    bath.gamma / (2.0 * PI) * l2 / (dw * dw + l2)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sinh() / x
    }
}

/// Validates a probability, snapping values within 1e-12 of [0, 1] onto it.
pub fn check_probability(p: f64) -> Result<f64> {
    if !p.is_finite() || p < -TOL || p > 1.0 + TOL {
        return Err(Error::InvalidProbability(p));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// p(t) = 1 − e^{−λt}[cos(dt/2) + (λ/d) sin(dt/2)]².
///
/// For imaginary d the bracket continues to cosh/sinh, and at d = 0 it is
/// 1 + λt/2. The form (λ/d) sin(dt/2) = (λt/2) sinc(dt/2) keeps all three
/// regimes continuous.
pub fn disturbance_probability(bath: &BathParams, t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::NegativeTime(t));
    }
    bath.validate()?;
    let lam = bath.lambda;
    let half = 0.5 * t;
    let d2 = bath.d_squared();
    // g = e^{−λt/2}·bracket, so p = 1 − g²
    let g = if d2 >= 0.0 {
        let x = d2.sqrt() * half;
        (-lam * half).exp() * (x.cos() + lam * half * sinc(x))
    } else {
        let y = (-d2).sqrt() * half;
        if y < 1e-4 {
            (-lam * half).exp() * (y.cosh() + lam * half * sinhc(y))
        } else {
            // split cosh/sinh to avoid overflow at long times
            let r = lam * half / y;
            0.5 * (y - lam * half).exp() * (1.0 + r) + 0.5 * (-y - lam * half).exp() * (1.0 - r)
        }
    };
    check_probability(1.0 - g * g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChannelKind {
    #[serde(rename = "pd")]
    PhaseDamping,
    #[serde(rename = "dep")]
    Depolarizing,
    #[serde(rename = "ad")]
    AmplitudeDamping,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 3] = [
        ChannelKind::PhaseDamping,
        ChannelKind::Depolarizing,
        ChannelKind::AmplitudeDamping,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ChannelKind::PhaseDamping => "pd",
            ChannelKind::Depolarizing => "dep",
            ChannelKind::AmplitudeDamping => "ad",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pd" | "phase-damping" => Ok(ChannelKind::PhaseDamping),
            "dep" | "depolarizing" => Ok(ChannelKind::Depolarizing),
            "ad" | "amplitude-damping" => Ok(ChannelKind::AmplitudeDamping),
            _ => Err(Error::Parse {
                what: "channel kind",
                input: s.to_string(),
            }),
        }
    }
}

pub type Qubit = Matrix2<Complex64>;

/// Single-qubit Kraus operators in the (↑, ↓) basis.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet {
    pub kind: ChannelKind,
    pub p: f64,
    pub operators: Vec<Qubit>,
}

impl KrausSet {
    pub fn identity() -> Self {
        KrausSet {
            kind: ChannelKind::PhaseDamping,
            p: 0.0,
            operators: vec![Qubit::identity()],
        }
    }

    /// max |Σ K†K − I|
    pub fn completeness_defect(&self) -> f64 {
        let sum: Qubit = self.operators.iter().map(|k| k.adjoint() * k).sum();
        (sum - Qubit::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Per-qubit Kraus operators for `kind` at disturbance probability `p`.
///
/// The depolarizing set shrinks each Bloch vector by √(1−p), so the pair
/// acting on a state with maximally mixed marginals gives the Werner form of
/// [`evolve`]. For other inputs the two differ.
pub fn local_kraus(kind: ChannelKind, p: f64) -> Result<KrausSet> {
    let p = check_probability(p)?;
    let z = ZERO;
    let operators = match kind {
        ChannelKind::PhaseDamping => vec![
            Qubit::new(real(1.0), z, z, real((1.0 - p).sqrt())),
            Qubit::new(z, z, z, real(p.sqrt())),
        ],
        ChannelKind::AmplitudeDamping => vec![
            Qubit::new(real((1.0 - p).sqrt()), z, z, real(1.0)),
            // √p |↓⟩⟨↑|
            Qubit::new(z, z, real(p.sqrt()), z),
        ],
        ChannelKind::Depolarizing => {
            let s = (1.0 - p).sqrt();
            let w0 = ((1.0 + 3.0 * s) / 4.0).sqrt();
            let w = ((1.0 - s) / 4.0).max(0.0).sqrt();
            let i = c(0.0, 1.0);
            vec![
                Qubit::identity() * real(w0),
                Qubit::new(z, real(w), real(w), z),
                Qubit::new(z, -i * w, i * w, z),
                Qubit::new(real(w), z, z, real(-w)),
            ]
        }
    };
    Ok(KrausSet { kind, p, operators })
}

fn pseudospin_bit(p: Pseudospin) -> usize {
    match p {
        Pseudospin::Up => 0,
        Pseudospin::Down => 1,
    }
}

/// Sector indices of the LR block in product order |σ_L σ_R⟩, σ = ↑ (0), ↓ (1).
pub fn lr_indices(statistics: Statistics) -> [usize; 4] {
    let basis = enumerate_basis(statistics);
    let mut out = [0; 4];
    for sl in [Pseudospin::Up, Pseudospin::Down] {
        for sr in [Pseudospin::Up, Pseudospin::Down] {
            let l = ModeIndex::new(Spatial::L, sl).index();
            let r = ModeIndex::new(Spatial::R, sr).index();
            out[2 * pseudospin_bit(sl) + pseudospin_bit(sr)] =
                basis.index_of_pair(l, r).expect("LR pair in every sector");
        }
    }
    out
}

fn require_lr(rho: &DensityOperator) -> Result<()> {
    let leak = rho.leakage_outside(ParityClass::LR);
    if leak > TOL {
        return Err(Error::SupportOutsideLR(leak));
    }
    Ok(())
}

/// Σ_{i,j} (K_i ⊗ K_j) ρ (K_i ⊗ K_j)† with the left factor on mode L.
pub fn apply_local_pair(kraus: &KrausSet, rho: &DensityOperator) -> Result<DensityOperator> {
    require_lr(rho)?;
    let idx = lr_indices(rho.statistics());
    let block = CMatrix::from_fn(4, 4, |r, c| rho.matrix()[(idx[r], idx[c])]);
    let mut out_block = CMatrix::zeros(4, 4);
    for kl in &kraus.operators {
        for kr in &kraus.operators {
            let k = CMatrix::from_fn(4, 4, |r, c| kl[(r / 2, c / 2)] * kr[(r % 2, c % 2)]);
            out_block += &k * &block * k.adjoint();
        }
    }
    let dim = rho.basis().dim();
    let mut m = CMatrix::zeros(dim, dim);
    for r in 0..4 {
        for c in 0..4 {
            m[(idx[r], idx[c])] = out_block[(r, c)];
        }
    }
    Ok(DensityOperator::from_raw(rho.statistics(), m))
}

/// The two-particle ground state |L↓, R↓⟩.
pub fn ground_state(statistics: Statistics) -> StateVector {
    product_state(ModeIndex::L_DOWN, ModeIndex::R_DOWN, statistics).expect("distinct modes")
}

/// Two identical local channels of `kind` acting for disturbance probability `p`.
///
/// * phase damping: LR coherences scaled by (1 − p), populations kept;
/// * depolarizing: (1 − p)ρ + (p/4)Π_LR;
/// * amplitude damping: (1 − p)ρ + p|L↓,R↓⟩⟨L↓,R↓| for inputs on the
///   antiparallel block, the local Kraus pair otherwise.
pub fn evolve(kind: ChannelKind, rho: &DensityOperator, p: f64) -> Result<DensityOperator> {
    let p = check_probability(p)?;
    require_lr(rho)?;
    let stats = rho.statistics();
    let m = rho.matrix();
    let out = match kind {
        ChannelKind::PhaseDamping => {
            let mut out = m.clone();
            let n = out.nrows();
            for r in 0..n {
                for c in 0..n {
                    if r != c {
                        out[(r, c)] *= 1.0 - p;
                    }
                }
            }
            out
        }
        ChannelKind::Depolarizing => {
            m * real(1.0 - p) + projector(ParityClass::LR, stats) * real(p / 4.0)
        }
        ChannelKind::AmplitudeDamping => {
            let idx = lr_indices(stats);
            // |↑↑⟩ and |↓↓⟩ rows/columns
            let parallel = [idx[0], idx[3]];
            let off_block = (0..m.nrows())
                .flat_map(|r| parallel.iter().map(move |&c| (r, c)))
                .map(|(r, c)| m[(r, c)].norm().max(m[(c, r)].norm()))
                .fold(0.0, f64::max);
            if off_block <= TOL {
                let g = ground_state(stats).density();
                m * real(1.0 - p) + g.matrix() * real(p)
            } else {
                return apply_local_pair(&local_kraus(kind, p)?, rho);
            }
        }
    };
    Ok(DensityOperator::from_raw(stats, out))
}

/// Long-time limit of local depolarization: Π_LR / 4.
pub fn reset_depolarize(statistics: Statistics) -> DensityOperator {
    DensityOperator::from_raw(
        statistics,
        projector(ParityClass::LR, statistics) * real(0.25),
    )
}

/// Long-time limit of local amplitude damping: |L↓, R↓⟩⟨L↓, R↓|.
pub fn reset_amplitude_damp(statistics: Statistics) -> DensityOperator {
    ground_state(statistics).density()
}
