//! Built-in self-checks behind the `verify` subcommand.
//!
//! Expected values are written out here as data (BS tables, closed forms,
//! limits) rather than pulled from the code under test.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use crate::channels::{
    disturbance_probability, evolve, ground_state, reset_depolarize, BathParams, ChannelKind,
};
use crate::cli::{sweep_csv, sweep_rows, SweepConfig};
use crate::detector::{parity_measure, Parity};
use crate::elements::{apply_to_state, beam_splitter, element_unitary, lift};
use crate::error::Result;
use crate::fock::{named_state, DensityOperator, NamedLabel, ParityClass, StateVector, Statistics};
use crate::linalg::{hermiticity_defect, max_abs, max_abs_vec, real, trace, CVector};
use crate::oracle::{lift_oracle, sector_leakage};
use crate::po_equiv::{generator_specs, po_graph, reach, verify_stated_edges, DEFAULT_THETAS};
use crate::protocol::{
    closed_form_probability, post_bs_state, run_exact, run_monte_carlo, InitialStateParams,
    ProtocolScheme, Scenario,
};
use crate::random::{random_lr_density, random_single_particle_unitary, seeded_rng};

pub const A_GRID: [f64; 5] = [0.0, 0.3, FRAC_1_SQRT_2, 0.9, 1.0];
pub const PHI_GRID: [f64; 4] = [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2];
pub const P_GRID: [f64; 4] = [0.0, 0.3, 0.7, 1.0];

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match f() {
        Ok((passed, detail)) => Check {
            name,
            passed,
            detail,
        },
        Err(e) => Check {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

type Combo = &'static [(f64, NamedLabel)];

/// BS images of LR states as linear combinations of named states.
pub fn bs_table(statistics: Statistics) -> [(NamedLabel, Combo); 4] {
    use NamedLabel::*;
    const H: f64 = FRAC_1_SQRT_2;
    match statistics {
        Statistics::Fermion => [
            (OneMinusLR, &[(1.0, OneMinusNO)]),
            (OnePlusLR, &[(-1.0, OnePlusLR)]),
            (TwoMinusLR, &[(-1.0, TwoMinusLR)]),
            (TwoPlusLR, &[(-1.0, TwoPlusLR)]),
        ],
        Statistics::Boson => [
            (OneMinusLR, &[(-1.0, OneMinusLR)]),
            (OnePlusLR, &[(1.0, OneMinusNO)]),
            (TwoMinusLR, &[(H, UMinusNO), (-H, DMinusNO)]),
            (TwoPlusLR, &[(H, UMinusNO), (H, DMinusNO)]),
        ],
    }
}

pub fn combination(statistics: Statistics, terms: Combo) -> Result<CVector> {
    let mut v = CVector::zeros(crate::fock::enumerate_basis(statistics).dim());
    for &(w, l) in terms {
        v += named_state(l, statistics)?.amplitudes() * real(w);
    }
    Ok(v)
}

/// Largest deviation over both directions of every BS arrow.
pub fn bs_table_error(statistics: Statistics) -> Result<f64> {
    let bs = beam_splitter(statistics);
    let mut worst: f64 = 0.0;
    for (from, image) in bs_table(statistics) {
        let src = named_state(from, statistics)?;
        let want = combination(statistics, image)?;
        let got = apply_to_state(&bs, &src)?;
        worst = worst.max(max_abs_vec(&(got.amplitudes() - &want)));
        let back = apply_to_state(&bs, &StateVector::new(statistics, want)?)?;
        worst = worst.max(max_abs_vec(&(back.amplitudes() - src.amplitudes())));
    }
    Ok(worst)
}

fn fidelity(rho: &DensityOperator, psi: &StateVector) -> f64 {
    rho.expectation(psi).unwrap_or(f64::NAN)
}

fn fid_label(rho: Option<&DensityOperator>, label: NamedLabel) -> f64 {
    rho.map_or(0.0, |r| {
        fidelity(r, &named_state(label, r.statistics()).expect("label valid"))
    })
}

fn check_bs_tables() -> Result<(bool, String)> {
    let f = bs_table_error(Statistics::Fermion)?;
    let b = bs_table_error(Statistics::Boson)?;
    Ok((
        f.max(b) <= 1e-12,
        format!("max error fermion {f:.1e}, boson {b:.1e}"),
    ))
}

fn check_dep_round() -> Result<(bool, String)> {
    let stats = Statistics::Fermion;
    let rho = post_bs_state(
        Scenario::ResetDepolarize,
        stats,
        &InitialStateParams::new(0.0, 0.0)?,
        1.0,
    )?;
    let m = parity_measure(&rho);
    let mut err = (m.even.probability - 0.25)
        .abs()
        .max((m.odd.probability - 0.75).abs());
    let even = m.even.conditional_state.as_ref().expect("even branch");
    let want_even = named_state(NamedLabel::OneMinusNO, stats)?.density();
    err = err.max(even.max_abs_diff(&want_even));
    let mix: Vec<StateVector> = [
        NamedLabel::OnePlusLR,
        NamedLabel::TwoMinusLR,
        NamedLabel::TwoPlusLR,
    ]
    .iter()
    .map(|&l| named_state(l, stats))
    .collect::<Result<_>>()?;
    let want_odd = DensityOperator::mixture(&[1.0 / 3.0; 3], &mix)?;
    err = err.max(
        m.odd
            .conditional_state
            .as_ref()
            .expect("odd branch")
            .max_abs_diff(&want_odd),
    );
    Ok((err <= 1e-12, format!("max error {err:.1e}")))
}

fn check_iterations() -> Result<(bool, String)> {
    let mut err: f64 = 0.0;
    let dep = run_exact(&ProtocolScheme::reset_depolarize(Statistics::Fermion, 30))?;
    for r in &dep.records {
        err = err.max((r.cumulative_success - (1.0 - 0.75f64.powi(r.j as i32))).abs());
    }
    for s in Statistics::ALL {
        for parity in [Parity::Odd, Parity::Even] {
            let ad = run_exact(&ProtocolScheme::reset_amplitude_damp(s, parity, 30))?;
            for r in &ad.records {
                err = err.max((r.cumulative_success - (1.0 - 0.5f64.powi(r.j as i32))).abs());
            }
        }
    }
    let trials = 100_000u64;
    let mut worst_sigma: f64 = 0.0;
    for (scheme, seed) in [
        (
            ProtocolScheme::reset_depolarize(Statistics::Fermion, 30),
            11u64,
        ),
        (
            ProtocolScheme::reset_amplitude_damp(Statistics::Fermion, Parity::Even, 30),
            12,
        ),
        (ProtocolScheme::reset_depolarize(Statistics::Boson, 30), 13),
    ] {
        let mc = run_monte_carlo(&scheme, trials, seed)?;
        for j in [1usize, 2, 5, 10] {
            let p = mc.records[j - 1].cumulative_success;
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            let f = mc.empirical_cumulative_frequency(j).expect("mc run");
            worst_sigma = worst_sigma.max((f - p).abs() / sigma);
        }
    }
    Ok((
        err <= 1e-12 && worst_sigma <= 3.0,
        format!("exact error {err:.1e}; Monte Carlo worst deviation {worst_sigma:.2} sigma"),
    ))
}

fn check_ad_round() -> Result<(bool, String)> {
    let stats = Statistics::Fermion;
    let rho = post_bs_state(
        Scenario::ResetAmplitudeDamp,
        stats,
        &InitialStateParams::new(0.0, 0.0)?,
        1.0,
    )?;
    let want = combination(
        stats,
        &[
            (FRAC_1_SQRT_2, NamedLabel::OneMinusNO),
            (-FRAC_1_SQRT_2, NamedLabel::OnePlusLR),
        ],
    )?;
    let mut err = rho.max_abs_diff(&StateVector::new(stats, want)?.density());
    let m = parity_measure(&rho);
    for b in [&m.odd, &m.even] {
        err = err.max((b.probability - 0.5).abs());
        err = err.max((b.conditional_state.as_ref().map_or(0.0, |s| s.purity()) - 1.0).abs());
    }
    Ok((err <= 1e-12, format!("max error {err:.1e}")))
}

fn check_non_reset_grid() -> Result<(bool, String)> {
    let mut err: f64 = 0.0;
    let mut swap: f64 = 0.0;
    for &a in &A_GRID {
        for &phi in &PHI_GRID {
            let init = InitialStateParams::new(a, phi)?;
            let x = a * init.b() * phi.cos();
            for &p in &P_GRID {
                for kind in ChannelKind::ALL {
                    let boson_odd = match kind {
                        ChannelKind::PhaseDamping => 0.5 - (1.0 - p) * x,
                        ChannelKind::Depolarizing => 0.5 - p / 4.0 - (1.0 - p) * x,
                        ChannelKind::AmplitudeDamping => (1.0 - p) * (0.5 - x),
                    };
                    let mut sim = [0.0; 2];
                    for (k, s) in Statistics::ALL.into_iter().enumerate() {
                        let m =
                            parity_measure(&post_bs_state(Scenario::NonReset(kind), s, &init, p)?);
                        let (odd, even) = match s {
                            Statistics::Boson => (boson_odd, 1.0 - boson_odd),
                            Statistics::Fermion => (1.0 - boson_odd, boson_odd),
                        };
                        err = err
                            .max((m.odd.probability - odd).abs())
                            .max((m.even.probability - even).abs());
                        let cf = closed_form_probability(Scenario::NonReset(kind), s, &init, p)?;
                        err = err.max((cf.odd - odd).abs());
                        sim[k] = m.odd.probability;
                        if s == Statistics::Fermion {
                            swap = swap.max((sim[0] - m.even.probability).abs());
                        }
                    }
                }
            }
        }
    }
    Ok((
        err <= 1e-12 && swap <= 1e-12,
        format!("closed-form error {err:.1e}, parity-swap error {swap:.1e} over 480 points"),
    ))
}

fn check_limits() -> Result<(bool, String)> {
    let mut err: f64 = 0.0;
    for &a in &A_GRID {
        for &phi in &PHI_GRID {
            let init = InitialStateParams::new(a, phi)?;
            let m = parity_measure(&post_bs_state(
                Scenario::NonReset(ChannelKind::Depolarizing),
                Statistics::Boson,
                &init,
                1.0,
            )?);
            err = err.max((m.odd.probability - 0.25).abs());
            let b = parity_measure(&post_bs_state(
                Scenario::NonReset(ChannelKind::AmplitudeDamping),
                Statistics::Boson,
                &init,
                1.0,
            )?);
            err = err.max(
                (fid_label(b.even.conditional_state.as_ref(), NamedLabel::DMinusNO) - 1.0).abs(),
            );
            let f = parity_measure(&post_bs_state(
                Scenario::NonReset(ChannelKind::AmplitudeDamping),
                Statistics::Fermion,
                &init,
                1.0,
            )?);
            let g = ground_state(Statistics::Fermion);
            let fo = f
                .odd
                .conditional_state
                .as_ref()
                .map_or(0.0, |r| fidelity(r, &g));
            err = err.max((fo - 1.0).abs());
        }
    }
    Ok((err <= 1e-12, format!("max error {err:.1e}")))
}

fn check_disturbance() -> Result<(bool, String)> {
    let bath = BathParams::default();
    let p0 = disturbance_probability(&bath, 0.0)?;
    let p1 = disturbance_probability(&bath, 1.5 * PI)?;
    let mut cont: f64 = 0.0;
    for gamma in [0.5, 1.0, 3.0] {
        let lam = 2.0 * gamma;
        for t in [0.3, 1.0, 4.0, 12.0] {
            let at = disturbance_probability(&BathParams::new(gamma, lam, 1.0)?, t)?;
            for eps in [1e-11, -1e-11] {
                let side =
                    disturbance_probability(&BathParams::new(gamma * (1.0 + eps), lam, 1.0)?, t)?;
                cont = cont.max((side - at).abs());
            }
        }
    }
    Ok((
        p0.abs() <= 1e-12 && (p1 - 1.0).abs() <= 1e-12 && cont <= 1e-9,
        format!(
            "p(0)={p0:.1e}, |p(3pi/2)-1|={:.1e}, branch jump {cont:.1e}",
            (p1 - 1.0).abs()
        ),
    ))
}

fn check_oracle() -> Result<(bool, String)> {
    let mut dev: f64 = 0.0;
    let mut leak: f64 = 0.0;
    let mut rng = seeded_rng(2024);
    let mut unitaries: Vec<_> = generator_specs(&DEFAULT_THETAS)?
        .into_iter()
        .map(element_unitary)
        .collect::<Result<_>>()?;
    unitaries.extend((0..20).map(|_| random_single_particle_unitary(&mut rng)));
    for u in &unitaries {
        for s in Statistics::ALL {
            let a = lift(u, s)?;
            let b = lift_oracle(u, s)?;
            dev = dev.max(max_abs(&(a.matrix() - b)));
            leak = leak.max(sector_leakage(u, s));
        }
    }
    Ok((
        dev <= 1e-10 && leak <= 1e-12,
        format!(
            "{} unitaries: deviation {dev:.1e}, leakage {leak:.1e}",
            unitaries.len()
        ),
    ))
}

fn check_po() -> Result<(bool, String)> {
    let r = reach(NamedLabel::OneMinusLR, Statistics::Fermion, 4)?;
    let reached = r.reached_labels().len();
    let fe = verify_stated_edges(Statistics::Fermion)?.all_passed();
    let be = verify_stated_edges(Statistics::Boson)?.all_passed();
    let g = po_graph(Statistics::Boson, 6)?;
    let split = g.component_of(NamedLabel::OneMinusLR) != g.component_of(NamedLabel::UPlusNO);
    Ok((
        reached == 6 && fe && be && split,
        format!("fermion labels reached {reached}/6, edges fermion {fe} boson {be}, boson split {split}"),
    ))
}

fn check_channels() -> Result<(bool, String)> {
    let mut rng = seeded_rng(77);
    let mut worst_tr: f64 = 0.0;
    let mut worst_h: f64 = 0.0;
    let mut min_eig = f64::INFINITY;
    for s in Statistics::ALL {
        for kind in ChannelKind::ALL {
            for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
                for _ in 0..50 {
                    let rho = random_lr_density(&mut rng, s);
                    let out = evolve(kind, &rho, p)?;
                    worst_tr = worst_tr.max((trace(out.matrix()) - real(1.0)).norm());
                    worst_h = worst_h.max(hermiticity_defect(out.matrix()));
                    min_eig = min_eig.min(out.min_eigenvalue());
                }
            }
        }
    }
    Ok((
        worst_tr <= 1e-12 && worst_h <= 1e-12 && min_eig >= -1e-12,
        format!(
            "trace error {worst_tr:.1e}, hermiticity {worst_h:.1e}, min eigenvalue {min_eig:.1e}"
        ),
    ))
}

fn check_determinism() -> Result<(bool, String)> {
    let cfg = SweepConfig {
        channel: ChannelKind::Depolarizing,
        statistics: Statistics::Fermion,
        a: vec![0.0, 0.5, 1.0],
        phi: vec![0.0, PI],
        t: vec![0.0, 1.0, 5.0],
        bath: BathParams::default(),
    };
    let a = sweep_csv(&sweep_rows(&cfg)?);
    let b = sweep_csv(&sweep_rows(&cfg)?);
    let scheme = ProtocolScheme::reset_depolarize(Statistics::Boson, 8);
    let x = run_monte_carlo(&scheme, 20_000, 42)?.to_json().to_string();
    let y = run_monte_carlo(&scheme, 20_000, 42)?.to_json().to_string();
    Ok((
        a == b && x == y,
        "sweep CSV and seeded Monte Carlo JSON repeated in-process".into(),
    ))
}

fn check_pd_ordering() -> Result<(bool, String)> {
    let mut ok = true;
    for &a in &A_GRID {
        for &p in &P_GRID {
            let pi = closed_form_probability(
                Scenario::NonReset(ChannelKind::PhaseDamping),
                Statistics::Boson,
                &InitialStateParams::new(a, PI)?,
                p,
            )?;
            let zero = closed_form_probability(
                Scenario::NonReset(ChannelKind::PhaseDamping),
                Statistics::Boson,
                &InitialStateParams::new(a, 0.0)?,
                p,
            )?;
            ok &= pi.odd >= zero.odd - 1e-15;
        }
    }
    Ok((ok, "odd probability at phi=pi never below phi=0".into()))
}

fn check_reset_fixed_point() -> Result<(bool, String)> {
    let mut err: f64 = 0.0;
    for s in Statistics::ALL {
        let rho = reset_depolarize(s);
        err = err.max(rho.leakage_outside(ParityClass::LR));
        err = err.max((rho.purity() - 0.25).abs());
        for kind in [ChannelKind::Depolarizing] {
            err = err.max(evolve(kind, &rho, 1.0)?.max_abs_diff(&rho));
        }
    }
    Ok((err <= 1e-12, format!("max error {err:.1e}")))
}

pub fn run_checks() -> Vec<Check> {
    vec![
        check("bs tables", check_bs_tables),
        check("depolarize-reset single round", check_dep_round),
        check("iteration closed forms", check_iterations),
        check("amplitude-damp reset single round", check_ad_round),
        check("non-reset closed forms", check_non_reset_grid),
        check("p = 1 limits", check_limits),
        check("disturbance probability", check_disturbance),
        check("oracle equivalence", check_oracle),
        check("po reachability", check_po),
        check("channel sanity", check_channels),
        check("determinism", check_determinism),
        check("phase-damping ordering", check_pd_ordering),
        check("depolarizing fixed point", check_reset_fixed_point),
    ]
}

pub fn render_table(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for c in checks {
        out.push_str(&format!(
            "{}  {:width$}  {}\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        ));
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    out.push_str(&format!("{passed}/{} checks passed\n", checks.len()));
    out
}
