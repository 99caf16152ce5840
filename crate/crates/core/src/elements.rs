//! Passive-optical elements as 4×4 single-particle unitaries, and their lift
//! to the two-particle sector.
//!
//! A single-particle unitary acts on creation operators as
//! c†_i → Σ_j U[j, i] c†_j, so column `i` is the image of mode `i`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{
    enumerate_basis, pair_creation, DensityOperator, ModeIndex, Pseudospin, Spatial, StateVector,
    Statistics, TOL,
};
use crate::linalg::{self, phase, real, CMatrix};

/// A passive-optical element and its parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ElementSpec {
    /// 50:50 beam splitter between L and R, pseudospin-blind.
    Bs,
    /// Phase e^{iθ} on both pseudospin components of one spatial mode.
    Pips { theta: f64, target: Spatial },
    /// Phase e^{iθ} on a single (spatial, pseudospin) mode.
    Pdps {
        theta: f64,
        target: Spatial,
        pseudospin: Pseudospin,
    },
    /// ↑ ↔ ↓ on one spatial mode.
    Pr { target: Spatial },
    /// Transmits ↑, exchanges L↓ and R↓.
    Pbs,
}

impl ElementSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ElementSpec::Bs => "BS",
            ElementSpec::Pips { .. } => "PIPS",
            ElementSpec::Pdps { .. } => "PDPS",
            ElementSpec::Pr { .. } => "PR",
            ElementSpec::Pbs => "PBS",
        }
    }

    fn theta(&self) -> Option<f64> {
        match *self {
            ElementSpec::Pips { theta, .. } | ElementSpec::Pdps { theta, .. } => Some(theta),
            _ => None,
        }
    }
}

/// Formats θ as a rational multiple of π when it is one with a small
/// denominator, otherwise as a plain decimal.
pub fn format_angle(theta: f64) -> String {
    if theta == 0.0 {
        return "0".to_string();
    }
    for den in [1u32, 2, 3, 4, 6, 8] {
        let num = theta / PI * den as f64;
        let rounded = num.round();
        if rounded >= 1.0 && (num - rounded).abs() < 1e-12 {
            let num = rounded as u64;
            let g = gcd(num, den as u64);
            let (num, den) = (num / g, den as u64 / g);
            let head = if num == 1 {
                String::new()
            } else {
                num.to_string()
            };
            return if den == 1 {
                format!("{head}pi")
            } else {
                format!("{head}pi/{den}")
            };
        }
    }
    format!("{theta}")
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Parses `pi`, `3pi/2`, `pi/4`, `0.5` and similar.
pub fn parse_angle(s: &str) -> Result<f64> {
    let err = || Error::Parse {
        what: "angle",
        input: s.to_string(),
    };
    let t = s.trim().to_ascii_lowercase().replace(['*', ' '], "");
    if let Some(pos) = t.find("pi") {
        let (head, rest) = t.split_at(pos);
        let rest = &rest[2..];
        let num: f64 = if head.is_empty() {
            1.0
        } else {
            head.parse().map_err(|_| err())?
        };
        let den: f64 = if rest.is_empty() {
            1.0
        } else {
            rest.strip_prefix('/')
                .ok_or_else(err)?
                .parse()
                .map_err(|_| err())?
        };
        if den == 0.0 {
            return Err(err());
        }
        Ok(num * PI / den)
    } else {
        t.parse().map_err(|_| err())
    }
}

impl fmt::Display for ElementSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ElementSpec::Bs => f.write_str("BS"),
            ElementSpec::Pbs => f.write_str("PBS"),
            ElementSpec::Pr { target } => write!(f, "PR({target})"),
            ElementSpec::Pips { theta, target } => {
                write!(f, "PIPS({},{target})", format_angle(theta))
            }
            ElementSpec::Pdps {
                theta,
                target,
                pseudospin,
            } => write!(f, "PDPS({},{target},{pseudospin})", format_angle(theta)),
        }
    }
}

impl FromStr for ElementSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (name, args) = match t.find('(') {
            Some(open) => {
                let close = t
                    .rfind(')')
                    .filter(|&c| c > open)
                    .ok_or_else(|| Error::Parse {
                        what: "element",
                        input: s.to_string(),
                    })?;
                let args: Vec<&str> = t[open + 1..close]
                    .split(',')
                    .map(str::trim)
                    .filter(|a| !a.is_empty())
                    .collect();
                (&t[..open], args)
            }
            None => (t, Vec::new()),
        };
        let name = name.trim().to_ascii_uppercase();
        let kind: &'static str = match name.as_str() {
            "BS" => "BS",
            "PBS" => "PBS",
            "PR" => "PR",
            "PIPS" => "PIPS",
            "PDPS" => "PDPS",
            _ => {
                return Err(Error::Parse {
                    what: "element",
                    input: s.to_string(),
                })
            }
        };
        let arg = |i: usize, parameter: &'static str| {
            args.get(i)
                .copied()
                .ok_or(Error::MissingParameter { kind, parameter })
        };
        let spec = match kind {
            "BS" => ElementSpec::Bs,
            "PBS" => ElementSpec::Pbs,
            "PR" => ElementSpec::Pr {
                target: arg(0, "spatial_target")?.parse()?,
            },
            "PIPS" => ElementSpec::Pips {
                theta: parse_angle(arg(0, "theta")?)?.rem_euclid(TAU),
                target: arg(1, "spatial_target")?.parse()?,
            },
            _ => ElementSpec::Pdps {
                theta: parse_angle(arg(0, "theta")?)?.rem_euclid(TAU),
                target: arg(1, "spatial_target")?.parse()?,
                pseudospin: arg(2, "pseudospin_target")?.parse()?,
            },
        };
        Ok(spec)
    }
}

/// A validated 4×4 unitary on the single-particle modes.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleParticleUnitary {
    matrix: CMatrix,
    source: Option<ElementSpec>,
}

impl SingleParticleUnitary {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != 4 || matrix.ncols() != 4 {
            return Err(Error::DimensionMismatch(format!(
                "single-particle unitary must be 4x4, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let defect = linalg::unitarity_defect(&matrix);
        if defect > TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(SingleParticleUnitary {
            matrix,
            source: None,
        })
    }

    pub fn identity() -> Self {
        SingleParticleUnitary {
            matrix: CMatrix::identity(4, 4),
            source: None,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn source(&self) -> Option<&ElementSpec> {
        self.source.as_ref()
    }
}

pub fn element_unitary(spec: ElementSpec) -> Result<SingleParticleUnitary> {
    if let Some(theta) = spec.theta() {
        if !theta.is_finite() || !(0.0..TAU).contains(&theta) {
            return Err(Error::InvalidParameter(format!(
                "{} phase {theta} outside [0, 2π)",
                spec.kind()
            )));
        }
    }
    let mode = |s, p| ModeIndex::new(s, p).index();
    let mut m = CMatrix::identity(4, 4);
    match spec {
        ElementSpec::Bs => {
            m.fill(real(0.0));
            let h = real(FRAC_1_SQRT_2);
            for p in [Pseudospin::Up, Pseudospin::Down] {
                let l = mode(Spatial::L, p);
                let r = mode(Spatial::R, p);
                // |L⟩ → (|L⟩ + |R⟩)/√2, |R⟩ → (|L⟩ − |R⟩)/√2
                m[(l, l)] = h;
                m[(r, l)] = h;
                m[(l, r)] = h;
                m[(r, r)] = -h;
            }
        }
        ElementSpec::Pips { theta, target } => {
            for p in [Pseudospin::Up, Pseudospin::Down] {
                let i = mode(target, p);
                m[(i, i)] = phase(theta);
            }
        }
        ElementSpec::Pdps {
            theta,
            target,
            pseudospin,
        } => {
            let i = mode(target, pseudospin);
            m[(i, i)] = phase(theta);
        }
        ElementSpec::Pr { target } => {
            let u = mode(target, Pseudospin::Up);
            let d = mode(target, Pseudospin::Down);
            m.swap_columns(u, d);
        }
        ElementSpec::Pbs => {
            let l = mode(Spatial::L, Pseudospin::Down);
            let r = mode(Spatial::R, Pseudospin::Down);
            m.swap_columns(l, r);
        }
    }
    Ok(SingleParticleUnitary {
        matrix: m,
        source: Some(spec),
    })
}

/// Provenance of a lifted operator.
#[derive(Clone, Debug, PartialEq)]
pub enum OperatorSource {
    Element(ElementSpec),
    /// Elements in application order.
    Composite(Vec<ElementSpec>),
    Custom,
}

/// A two-particle unitary induced by a single-particle one.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedOperator {
    statistics: Statistics,
    matrix: CMatrix,
    source: OperatorSource,
}

impl LiftedOperator {
    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn source(&self) -> &OperatorSource {
        &self.source
    }

    fn check(&self, statistics: Statistics) -> Result<()> {
        if self.statistics != statistics {
            return Err(Error::DimensionMismatch(format!(
                "{} operator applied to {statistics} state",
                self.statistics
            )));
        }
        Ok(())
    }
}

/// Expands each basis vector as a product of creation operators, substitutes
/// c†_i → Σ_j U[j,i] c†_j and reorders onto the occupation basis.
pub fn lift(u: &SingleParticleUnitary, statistics: Statistics) -> Result<LiftedOperator> {
    let defect = linalg::unitarity_defect(&u.matrix);
    if defect > TOL {
        return Err(Error::NotUnitary(defect));
    }
    let basis = enumerate_basis(statistics);
    let dim = basis.dim();
    let mut out = CMatrix::zeros(dim, dim);
    for (col, occ) in basis.states().iter().enumerate() {
        let (i, j) = occ.modes();
        let norm = if i == j {
            std::f64::consts::SQRT_2
        } else {
            1.0
        };
        for k in 0..4 {
            for l in 0..4 {
                let amp: Complex64 = u.matrix[(k, i)] * u.matrix[(l, j)];
                if amp.norm() == 0.0 {
                    continue;
                }
                if let Some((row, coeff)) = pair_creation(k, l, statistics) {
                    out[(row, col)] += amp * coeff / norm;
                }
            }
        }
    }
    let source = match u.source {
        Some(spec) => OperatorSource::Element(spec),
        None => OperatorSource::Custom,
    };
    Ok(LiftedOperator {
        statistics,
        matrix: out,
        source,
    })
}

pub fn lift_element(spec: ElementSpec, statistics: Statistics) -> Result<LiftedOperator> {
    lift(&element_unitary(spec)?, statistics)
}

/// The lifted 50:50 beam splitter.
pub fn beam_splitter(statistics: Statistics) -> LiftedOperator {
    lift_element(ElementSpec::Bs, statistics).expect("beam splitter is unitary")
}

pub fn apply_to_state(op: &LiftedOperator, psi: &StateVector) -> Result<StateVector> {
    op.check(psi.statistics())?;
    Ok(StateVector::from_raw(
        psi.statistics(),
        &op.matrix * psi.amplitudes(),
    ))
}

/// ρ → U ρ U†
pub fn apply_to_density(op: &LiftedOperator, rho: &DensityOperator) -> Result<DensityOperator> {
    op.check(rho.statistics())?;
    Ok(DensityOperator::from_raw(
        rho.statistics(),
        &op.matrix * rho.matrix() * op.matrix.adjoint(),
    ))
}

/// Product of `ops`, the first element applied first.
pub fn compose(ops: &[LiftedOperator]) -> Result<LiftedOperator> {
    let first = ops
        .first()
        .ok_or_else(|| Error::InvalidParameter("cannot compose an empty sequence".into()))?;
    let statistics = first.statistics;
    let dim = first.matrix.nrows();
    let mut matrix = CMatrix::identity(dim, dim);
    let mut specs = Vec::new();
    let mut traceable = true;
    for op in ops {
        op.check(statistics)?;
        matrix = &op.matrix * matrix;
        match &op.source {
            OperatorSource::Element(s) => specs.push(*s),
            OperatorSource::Composite(v) => specs.extend(v.iter().copied()),
            OperatorSource::Custom => traceable = false,
        }
    }
    Ok(LiftedOperator {
        statistics,
        matrix,
        source: if traceable {
            OperatorSource::Composite(specs)
        } else {
            OperatorSource::Custom
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{named_state, NamedLabel, ParityClass};
    use crate::linalg::max_abs_vec;

    const B: Statistics = Statistics::Boson;
    const F: Statistics = Statistics::Fermion;

    fn all_specs() -> Vec<ElementSpec> {
        let mut v = vec![ElementSpec::Bs, ElementSpec::Pbs];
        for target in [Spatial::L, Spatial::R] {
            v.push(ElementSpec::Pr { target });
            for theta in [0.0, PI / 2.0, PI, 1.234] {
                v.push(ElementSpec::Pips { theta, target });
                for pseudospin in [Pseudospin::Up, Pseudospin::Down] {
                    v.push(ElementSpec::Pdps {
                        theta,
                        target,
                        pseudospin,
                    });
                }
            }
        }
        v
    }

    #[test]
    fn bs_matrix() {
        let u = element_unitary(ElementSpec::Bs).unwrap();
        let h = FRAC_1_SQRT_2;
        let expected = [
            [h, 0.0, h, 0.0],
            [0.0, h, 0.0, h],
            [h, 0.0, -h, 0.0],
            [0.0, h, 0.0, -h],
        ];
        for (r, row) in expected.iter().enumerate() {
            for (c, &x) in row.iter().enumerate() {
                assert!((u.matrix()[(r, c)] - real(x)).norm() < TOL);
            }
        }
    }

    #[test]
    fn zero_phase_and_double_rotation_are_identity() {
        let id = CMatrix::identity(4, 4);
        let pips = element_unitary(ElementSpec::Pips {
            theta: 0.0,
            target: Spatial::L,
        })
        .unwrap();
        assert!(linalg::max_abs(&(pips.matrix() - &id)) < TOL);
        let pr = element_unitary(ElementSpec::Pr { target: Spatial::L }).unwrap();
        assert!(linalg::max_abs(&(pr.matrix() * pr.matrix() - &id)) < TOL);
        for s in Statistics::ALL {
            let l = lift_element(ElementSpec::Pr { target: Spatial::L }, s).unwrap();
            let twice = compose(&[l.clone(), l]).unwrap();
            let n = twice.matrix().nrows();
            assert!(linalg::max_abs(&(twice.matrix() - CMatrix::identity(n, n))) < TOL);
        }
    }

    #[test]
    fn every_lift_is_unitary() {
        for spec in all_specs() {
            for s in Statistics::ALL {
                let op = lift_element(spec, s).unwrap();
                assert!(linalg::unitarity_defect(op.matrix()) < TOL, "{spec} {s}");
            }
        }
    }

    #[test]
    fn identity_lifts_to_identity() {
        for s in Statistics::ALL {
            let op = lift(&SingleParticleUnitary::identity(), s).unwrap();
            let n = op.matrix().nrows();
            assert!(linalg::max_abs(&(op.matrix() - CMatrix::identity(n, n))) < TOL);
        }
    }

    #[test]
    fn missing_and_bad_parameters() {
        assert_eq!(
            "PIPS(pi)".parse::<ElementSpec>(),
            Err(Error::MissingParameter {
                kind: "PIPS",
                parameter: "spatial_target"
            })
        );
        assert!(matches!(
            "PR".parse::<ElementSpec>(),
            Err(Error::MissingParameter { kind: "PR", .. })
        ));
        assert!(matches!(
            element_unitary(ElementSpec::Pips {
                theta: 7.0,
                target: Spatial::L
            }),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn non_unitary_rejected() {
        let mut m = CMatrix::identity(4, 4);
        m[(0, 0)] = real(2.0);
        assert!(matches!(
            SingleParticleUnitary::new(m),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn spec_strings() {
        for (text, spec) in [
            ("BS", ElementSpec::Bs),
            ("PBS", ElementSpec::Pbs),
            ("PR(L)", ElementSpec::Pr { target: Spatial::L }),
            (
                "PIPS(pi,L)",
                ElementSpec::Pips {
                    theta: PI,
                    target: Spatial::L,
                },
            ),
            (
                "PDPS(pi/2,R,up)",
                ElementSpec::Pdps {
                    theta: PI / 2.0,
                    target: Spatial::R,
                    pseudospin: Pseudospin::Up,
                },
            ),
            (
                "PIPS(3pi/2,R)",
                ElementSpec::Pips {
                    theta: 3.0 * PI / 2.0,
                    target: Spatial::R,
                },
            ),
        ] {
            assert_eq!(spec.to_string(), text);
            assert_eq!(text.parse::<ElementSpec>().unwrap(), spec);
        }
    }

    fn image(label: NamedLabel, s: Statistics) -> StateVector {
        apply_to_state(&beam_splitter(s), &named_state(label, s).unwrap()).unwrap()
    }

    fn named(label: NamedLabel, s: Statistics) -> StateVector {
        named_state(label, s).unwrap()
    }

    #[test]
    fn bs_is_an_involution_on_the_noon_singlet() {
        let back = image(NamedLabel::OneMinusNO, F);
        assert!(
            max_abs_vec(&(back.amplitudes() - named(NamedLabel::OneMinusLR, F).amplitudes())) < TOL
        );
    }

    #[test]
    fn singlet_is_the_only_bell_state_with_distinct_parity_behaviour() {
        use NamedLabel::*;
        for label in [OneMinusLR, OnePlusLR, TwoMinusLR, TwoPlusLR] {
            let fer_stays = image(label, F).supported_in(ParityClass::LR);
            let bos_stays = image(label, B).supported_in(ParityClass::LR);
            if label == OneMinusLR {
                assert!(!fer_stays && bos_stays);
            } else {
                assert!(fer_stays && !bos_stays);
            }
        }
    }

    #[test]
    fn density_conjugation_preserves_trace() {
        let rho = named(NamedLabel::TwoPlusLR, B).density();
        let out = apply_to_density(&beam_splitter(B), &rho).unwrap();
        assert!((out.trace() - 1.0).abs() < TOL);
    }

    #[test]
    fn mismatched_statistics_rejected() {
        let psi = named(NamedLabel::OneMinusLR, B);
        assert!(matches!(
            apply_to_state(&beam_splitter(F), &psi),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
