use parity_distill::elements::{
    apply_to_state, element_unitary, lift, ElementSpec, SingleParticleUnitary,
};
use parity_distill::fock::{enumerate_basis, named_state, NamedLabel, StateVector, Statistics};
use parity_distill::linalg::{max_abs, max_abs_vec, real, CVector};
use parity_distill::oracle::{
    from_occupation, lift_oracle, sector_leakage, to_occupation, LabeledState,
};
use parity_distill::po_equiv::{generator_specs, DEFAULT_THETAS};
use parity_distill::random::{random_single_particle_unitary, seeded_rng};
use proptest::prelude::*;

fn deviation(u: &SingleParticleUnitary, s: Statistics) -> f64 {
    let a = lift(u, s).unwrap();
    let b = lift_oracle(u, s).unwrap();
    max_abs(&(a.matrix() - b))
}

#[test]
fn generators_agree_with_oracle() {
    for spec in generator_specs(&DEFAULT_THETAS).unwrap() {
        let u = element_unitary(spec).unwrap();
        for s in Statistics::ALL {
            assert!(deviation(&u, s) <= 1e-10, "{spec} {s}");
            assert!(sector_leakage(&u, s) <= 1e-12);
        }
    }
}

#[test]
fn seeded_random_unitaries_agree_with_oracle() {
    let mut rng = seeded_rng(2024);
    for _ in 0..20 {
        let u = random_single_particle_unitary(&mut rng);
        for s in Statistics::ALL {
            assert!(deviation(&u, s) <= 1e-10);
            assert!(sector_leakage(&u, s) <= 1e-12);
        }
    }
}

#[test]
fn beam_splitter_through_labeled_space() {
    // push 1−LR through U⊗U by hand and read it back
    let bs = element_unitary(ElementSpec::Bs).unwrap();
    for s in Statistics::ALL {
        let psi = named_state(NamedLabel::OneMinusLR, s).unwrap();
        let ls = from_occupation(&psi);
        let uu = parity_distill::linalg::kron(bs.matrix(), bs.matrix());
        let out = LabeledState {
            amplitudes: uu * ls.amplitudes,
        };
        let back = to_occupation(&out, s).unwrap();
        let direct = apply_to_state(&lift(&bs, s).unwrap(), &psi).unwrap();
        assert!(max_abs_vec(&(back.amplitudes() - direct.amplitudes())) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lift_matches_oracle_for_any_seed(seed in any::<u64>()) {
        let u = random_single_particle_unitary(&mut seeded_rng(seed));
        for s in Statistics::ALL {
            prop_assert!(deviation(&u, s) <= 1e-10);
        }
    }

    #[test]
    fn lift_is_a_homomorphism(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let u = random_single_particle_unitary(&mut rng);
        let v = random_single_particle_unitary(&mut rng);
        let uv = SingleParticleUnitary::new(u.matrix() * v.matrix()).unwrap();
        for s in Statistics::ALL {
            let lhs = lift(&uv, s).unwrap();
            let rhs = lift(&u, s).unwrap().matrix() * lift(&v, s).unwrap().matrix();
            prop_assert!(max_abs(&(lhs.matrix() - rhs)) <= 1e-10);
        }
    }

    #[test]
    fn occupation_round_trip(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        for s in Statistics::ALL {
            let dim = enumerate_basis(s).dim();
            let g = parity_distill::random::ginibre(&mut rng, dim);
            let v: CVector = g.column(0).into_owned();
            let psi = StateVector::normalized(s, v * real(1.0)).unwrap();
            let back = to_occupation(&from_occupation(&psi), s).unwrap();
            prop_assert!(max_abs_vec(&(back.amplitudes() - psi.amplitudes())) <= 1e-12);
        }
    }
}
