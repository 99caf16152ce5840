//! Ideal pseudospin-blind, non-absorbing parity check.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::fock::{projector, DensityOperator, ParityClass};
use crate::linalg::{real, trace};

/// Branches with probability below this carry no conditional state.
pub const ZERO_BRANCH: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    /// One particle per spatial mode.
    Odd,
    /// Both particles in one spatial mode.
    Even,
}

impl Parity {
    pub fn class(self) -> ParityClass {
        match self {
            Parity::Odd => ParityClass::LR,
            Parity::Even => ParityClass::NO,
        }
    }

    pub fn other(self) -> Parity {
        match self {
            Parity::Odd => Parity::Even,
            Parity::Even => Parity::Odd,
        }
    }
}

impl From<ParityClass> for Parity {
    fn from(c: ParityClass) -> Self {
        match c {
            ParityClass::LR => Parity::Odd,
            ParityClass::NO => Parity::Even,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Odd => "odd",
            Parity::Even => "even",
        })
    }
}

impl std::str::FromStr for Parity {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "odd" => Ok(Parity::Odd),
            "even" => Ok(Parity::Even),
            _ => Err(crate::Error::Parse {
                what: "parity",
                input: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParityOutcome {
    pub parity: Parity,
    pub probability: f64,
    pub conditional_state: Option<DensityOperator>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParityMeasurement {
    pub odd: ParityOutcome,
    pub even: ParityOutcome,
}

impl ParityMeasurement {
    pub fn branch(&self, parity: Parity) -> &ParityOutcome {
        match parity {
            Parity::Odd => &self.odd,
            Parity::Even => &self.even,
        }
    }
}

fn project(rho: &DensityOperator, parity: Parity) -> ParityOutcome {
    let p = projector(parity.class(), rho.statistics());
    let projected = &p * rho.matrix() * &p;
    let probability = trace(&projected).re.clamp(0.0, 1.0);
    let conditional_state = (probability >= ZERO_BRANCH).then(|| {
        let m = projected * real(1.0 / probability);
        // restore exact Hermiticity lost to round-off
        let m = (&m + m.adjoint()) * real(0.5);
        DensityOperator::from_raw(rho.statistics(), m)
    });
    ParityOutcome {
        parity,
        probability,
        conditional_state,
    }
}

/// Projective parity measurement: p = Tr(Π ρ), conditional Π ρ Π / p.
pub fn parity_measure(rho: &DensityOperator) -> ParityMeasurement {
    ParityMeasurement {
        odd: project(rho, Parity::Odd),
        even: project(rho, Parity::Even),
    }
}

/// Two single-particle detectors in coincidence: the odd branch only.
pub fn coincidence_postselect(rho: &DensityOperator) -> (f64, Option<DensityOperator>) {
    let odd = project(rho, Parity::Odd);
    (odd.probability, odd.conditional_state)
}
