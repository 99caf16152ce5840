use std::f64::consts::FRAC_1_SQRT_2;

use parity_distill::detector::{coincidence_postselect, parity_measure, Parity};
use parity_distill::elements::{apply_to_density, beam_splitter};
use parity_distill::fock::{named_state, DensityOperator, NamedLabel, Statistics};
use parity_distill::linalg::{c, CMatrix};
use parity_distill::protocol::{post_bs_state, InitialStateParams, Scenario};
use parity_distill::random::{ginibre, random_lr_density, seeded_rng};
use proptest::prelude::*;

fn random_density(seed: u64, s: Statistics) -> DensityOperator {
    let mut rng = seeded_rng(seed);
    let dim = parity_distill::fock::enumerate_basis(s).dim();
    let g = ginibre(&mut rng, dim);
    let m: CMatrix = &g * g.adjoint();
    let tr: f64 = m.diagonal().iter().map(|z| z.re).sum();
    let m = m * c(1.0 / tr, 0.0);
    DensityOperator::new(s, (&m + m.adjoint()) * c(0.5, 0.0)).unwrap()
}

#[test]
fn named_states_measure_deterministically() {
    for s in Statistics::ALL {
        for l in NamedLabel::for_statistics(s) {
            let m = parity_measure(&named_state(l, s).unwrap().density());
            let want = Parity::from(l.parity_class());
            assert_eq!(m.branch(want).probability, 1.0);
            assert!(m.branch(want.other()).conditional_state.is_none());
        }
    }
}

#[test]
fn coincidence_matches_odd_branch() {
    let f = Statistics::Fermion;
    let rho = post_bs_state(
        Scenario::ResetAmplitudeDamp,
        f,
        &InitialStateParams::new(0.0, 0.0).unwrap(),
        1.0,
    )
    .unwrap();
    let (p, cond) = coincidence_postselect(&rho);
    assert!((p - 0.5).abs() < 1e-12);
    let want = named_state(NamedLabel::OnePlusLR, f).unwrap().density();
    assert!(cond.unwrap().max_abs_diff(&want) < 1e-12);
    let (p0, none) =
        coincidence_postselect(&named_state(NamedLabel::OneMinusNO, f).unwrap().density());
    assert_eq!((p0, none), (0.0, None));
    // singlet stays odd for bosons through the BS
    let b = Statistics::Boson;
    let singlet = named_state(NamedLabel::OneMinusLR, b).unwrap().density();
    let (p1, _) = coincidence_postselect(&apply_to_density(&beam_splitter(b), &singlet).unwrap());
    assert!((p1 - 1.0).abs() < 1e-12);
    let bell = InitialStateParams::new(FRAC_1_SQRT_2, 0.0)
        .unwrap()
        .state(b)
        .density();
    let (p2, _) = coincidence_postselect(&apply_to_density(&beam_splitter(b), &bell).unwrap());
    assert!(p2.abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn branches_are_consistent(seed in any::<u64>(), fermion in any::<bool>()) {
        let s = if fermion { Statistics::Fermion } else { Statistics::Boson };
        let rho = random_density(seed, s);
        let m = parity_measure(&rho);
        prop_assert!((m.odd.probability + m.even.probability - 1.0).abs() <= 1e-12);
        for par in [Parity::Odd, Parity::Even] {
            let b = m.branch(par);
            let cond = b.conditional_state.as_ref().unwrap();
            prop_assert!((cond.trace() - 1.0).abs() <= 1e-12);
            prop_assert!(cond.leakage_outside(par.class()) <= 1e-12);
            prop_assert!(cond.min_eigenvalue() >= -1e-12);
            let again = parity_measure(cond);
            prop_assert!((again.branch(par).probability - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn lr_inputs_are_odd(seed in any::<u64>()) {
        let rho = random_lr_density(&mut seeded_rng(seed), Statistics::Fermion);
        prop_assert!((parity_measure(&rho).odd.probability - 1.0).abs() <= 1e-12);
    }
}
