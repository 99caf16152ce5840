//! The distillation engine.
//!
//! Reset schemes drive the pair to a fixed state (maximally mixed LR state
//! or the ground state |L↓,R↓⟩), optionally rotate the pseudospin on L, send
//! both particles through the beam splitter and check parity. The target
//! branch is kept; the other branch is reset and tried again. Non-reset runs
//! start from a|L↑,R↓⟩ + b e^{iφ}|L↓,R↑⟩, apply a local channel for a time t
//! and measure once.

use std::f64::consts::TAU;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::channels::{
    check_probability, disturbance_probability, evolve, ground_state, reset_amplitude_damp,
    reset_depolarize, BathParams, ChannelKind,
};
use crate::detector::{parity_measure, Parity, ParityMeasurement};
use crate::elements::{apply_to_density, beam_splitter, lift_element, ElementSpec};
use crate::error::{Error, Result};
use crate::fock::{
    named_state, product_state, DensityOperator, ModeIndex, NamedLabel, ParityClass, Spatial,
    StateVector, Statistics, TOL,
};
use crate::linalg::{phase, real};
use crate::numfmt::round15;

/// Trials per independent random stream in Monte Carlo runs.
pub const MC_CHUNK: u64 = 4096;

pub const MC_GENERATOR: &str = "ChaCha8 (rand_chacha), one stream per 4096-trial chunk";

/// Parameters of a|L↑,R↓⟩ + b e^{iφ}|L↓,R↑⟩ with b = √(1 − a²).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitialStateParams {
    a: f64,
    phi: f64,
}

impl InitialStateParams {
    pub fn new(a: f64, phi: f64) -> Result<Self> {
        if !a.is_finite() || !(0.0..=1.0).contains(&a) {
            return Err(Error::InvalidParameter(format!(
                "a must lie in [0, 1], got {a}"
            )));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "phi must be finite, got {phi}"
            )));
        }
        Ok(InitialStateParams {
            a,
            phi: phi.rem_euclid(TAU),
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        (1.0 - self.a * self.a).max(0.0).sqrt()
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn state(&self, statistics: Statistics) -> StateVector {
        let up_down =
            product_state(ModeIndex::L_UP, ModeIndex::R_DOWN, statistics).expect("distinct modes");
        let down_up =
            product_state(ModeIndex::L_DOWN, ModeIndex::R_UP, statistics).expect("distinct modes");
        let amps = up_down.amplitudes() * real(self.a)
            + down_up.amplitudes() * (phase(self.phi) * self.b());
        StateVector::normalized(statistics, amps).expect("unit vector")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Variant {
    ResetDepolarize,
    ResetAmplitudeDamp,
    NonReset {
        channel: ChannelKind,
        init: InitialStateParams,
        bath: BathParams,
        time: f64,
    },
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::ResetDepolarize => "reset-dep",
            Variant::ResetAmplitudeDamp => "reset-ad",
            Variant::NonReset { .. } => "non-reset",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolScheme {
    pub variant: Variant,
    pub statistics: Statistics,
    pub apply_pr_before_bs: bool,
    pub target_parity: Parity,
    pub max_iterations: usize,
}

impl ProtocolScheme {
    /// Fermions are collected on even parity (|1−⟩_NO), bosons on odd (|1−⟩_LR).
    pub fn reset_depolarize(statistics: Statistics, max_iterations: usize) -> Self {
        ProtocolScheme {
            variant: Variant::ResetDepolarize,
            statistics,
            apply_pr_before_bs: false,
            target_parity: default_target(statistics),
            max_iterations,
        }
    }

    pub fn reset_amplitude_damp(
        statistics: Statistics,
        target_parity: Parity,
        max_iterations: usize,
    ) -> Self {
        ProtocolScheme {
            variant: Variant::ResetAmplitudeDamp,
            statistics,
            apply_pr_before_bs: true,
            target_parity,
            max_iterations,
        }
    }

    /// Single-shot run; the target parity defaults to the branch holding the
    /// BS image of the singlet.
    pub fn non_reset(
        statistics: Statistics,
        channel: ChannelKind,
        init: InitialStateParams,
        bath: BathParams,
        time: f64,
    ) -> Self {
        ProtocolScheme {
            variant: Variant::NonReset {
                channel,
                init,
                bath,
                time,
            },
            statistics,
            apply_pr_before_bs: false,
            target_parity: default_target(statistics),
            max_iterations: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidScheme(
                "max_iterations must be positive".into(),
            ));
        }
        match self.variant {
            Variant::ResetDepolarize => {
                if self.apply_pr_before_bs {
                    return Err(Error::InvalidScheme(
                        "reset-dep uses no pseudospin rotator".into(),
                    ));
                }
                if self.target_parity != default_target(self.statistics) {
                    return Err(Error::InvalidScheme(format!(
                        "reset-dep with {} collects the {} branch",
                        self.statistics,
                        default_target(self.statistics)
                    )));
                }
            }
            Variant::ResetAmplitudeDamp => {
                if !self.apply_pr_before_bs {
                    return Err(Error::InvalidScheme(
                        "reset-ad requires the rotator on L".into(),
                    ));
                }
            }
            Variant::NonReset { bath, time, .. } => {
                if self.max_iterations != 1 {
                    return Err(Error::InvalidScheme(
                        "non-reset runs are single-shot".into(),
                    ));
                }
                if self.apply_pr_before_bs {
                    return Err(Error::InvalidScheme(
                        "non-reset runs use no pseudospin rotator".into(),
                    ));
                }
                bath.validate()?;
                if !(time >= 0.0) || !time.is_finite() {
                    return Err(Error::NegativeTime(time));
                }
            }
        }
        Ok(())
    }
}

fn default_target(statistics: Statistics) -> Parity {
    match statistics {
        Statistics::Boson => Parity::Odd,
        Statistics::Fermion => Parity::Even,
    }
}

/// Which pipeline a closed form or post-BS state refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    ResetDepolarize,
    ResetAmplitudeDamp,
    NonReset(ChannelKind),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BranchProbabilities {
    pub odd: f64,
    pub even: f64,
}

impl BranchProbabilities {
    pub fn get(&self, parity: Parity) -> f64 {
        match parity {
            Parity::Odd => self.odd,
            Parity::Even => self.even,
        }
    }
}

/// Closed-form branch probabilities. Bosonic odd probabilities:
///
/// * phase damping: 1/2 − (1−p)·ab·cos φ
/// * depolarizing: 1/2 − p/4 − (1−p)·ab·cos φ
/// * amplitude damping: (1−p)(1/2 − ab·cos φ)
///
/// Fermions swap the two branches.
pub fn closed_form_probability(
    scenario: Scenario,
    statistics: Statistics,
    init: &InitialStateParams,
    p: f64,
) -> Result<BranchProbabilities> {
    let p = check_probability(p)?;
    let boson_odd = match scenario {
        Scenario::ResetDepolarize => 0.25,
        Scenario::ResetAmplitudeDamp => 0.5,
        Scenario::NonReset(kind) => {
            let x = init.a() * init.b() * init.phi().cos();
            match kind {
                ChannelKind::PhaseDamping => 0.5 - (1.0 - p) * x,
                ChannelKind::Depolarizing => 0.5 - p / 4.0 - (1.0 - p) * x,
                ChannelKind::AmplitudeDamping => (1.0 - p) * (0.5 - x),
            }
        }
    };
    Ok(match statistics {
        Statistics::Boson => BranchProbabilities {
            odd: boson_odd,
            even: 1.0 - boson_odd,
        },
        Statistics::Fermion => BranchProbabilities {
            odd: 1.0 - boson_odd,
            even: boson_odd,
        },
    })
}

/// Full state right after the beam splitter, built by running the pipeline.
pub fn post_bs_state(
    scenario: Scenario,
    statistics: Statistics,
    init: &InitialStateParams,
    p: f64,
) -> Result<DensityOperator> {
    let pre = match scenario {
        Scenario::ResetDepolarize => reset_depolarize(statistics),
        Scenario::ResetAmplitudeDamp => {
            let pr = lift_element(ElementSpec::Pr { target: Spatial::L }, statistics)?;
            apply_to_density(&pr, &reset_amplitude_damp(statistics))?
        }
        Scenario::NonReset(kind) => evolve(kind, &init.state(statistics).density(), p)?,
    };
    apply_to_density(&beam_splitter(statistics), &pre)
}

/// Reference states against which distilled states are scored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Reference {
    Named(NamedLabel),
    /// |L↓, R↓⟩
    Ground,
}

impl Reference {
    pub fn state(&self, statistics: Statistics) -> Result<StateVector> {
        match self {
            Reference::Named(l) => named_state(*l, statistics),
            Reference::Ground => Ok(ground_state(statistics)),
        }
    }

    /// Named states valid for `statistics`, then the ground state.
    pub fn candidates(statistics: Statistics) -> Vec<Reference> {
        NamedLabel::for_statistics(statistics)
            .into_iter()
            .map(Reference::Named)
            .chain(std::iter::once(Reference::Ground))
            .collect()
    }
}

impl fmt::Display for Reference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reference::Named(l) => write!(f, "{l}"),
            Reference::Ground => f.write_str("ground"),
        }
    }
}

impl Serialize for Reference {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Reference state with the largest fidelity to `rho`; ties go to the
/// earlier candidate.
pub fn dominant_reference(rho: &DensityOperator) -> (Reference, f64) {
    let mut best = (Reference::Ground, f64::NEG_INFINITY);
    for r in Reference::candidates(rho.statistics()) {
        let psi = r
            .state(rho.statistics())
            .expect("candidate valid for statistics");
        let f = rho.expectation(&psi).expect("same sector");
        if f > best.1 + TOL {
            best = (r, f);
        }
    }
    (best.0, best.1.clamp(0.0, 1.0))
}

/// Target of a reset scheme's collected branch.
pub fn reset_target(
    variant: &Variant,
    statistics: Statistics,
    parity: Parity,
) -> Option<Reference> {
    use NamedLabel::*;
    let label = match (variant, statistics, parity) {
        (Variant::ResetDepolarize, Statistics::Fermion, Parity::Even) => OneMinusNO,
        (Variant::ResetDepolarize, Statistics::Boson, Parity::Odd) => OneMinusLR,
        (Variant::ResetAmplitudeDamp, Statistics::Fermion, Parity::Odd) => OnePlusLR,
        (Variant::ResetAmplitudeDamp, Statistics::Boson, Parity::Odd) => OneMinusLR,
        (Variant::ResetAmplitudeDamp, _, Parity::Even) => OneMinusNO,
        _ => return None,
    };
    Some(Reference::Named(label))
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub j: usize,
    /// Branch probabilities of this round's measurement, given the round is reached.
    pub p_odd: f64,
    pub p_even: f64,
    /// Probability that the run ends successfully at exactly this round.
    pub success_this_round: f64,
    pub cumulative_success: f64,
    pub distilled_state: Option<DensityOperator>,
    pub fidelity_to_target: f64,
    pub target: Reference,
    pub purity: Option<f64>,
    pub measurement: ParityMeasurement,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct EmpiricalCounts {
    pub reached: u64,
    pub odd: u64,
    pub even: u64,
    pub successes: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunMode {
    Exact,
    MonteCarlo,
}

impl RunMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RunMode::Exact => "exact",
            RunMode::MonteCarlo => "monte_carlo",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub scheme: ProtocolScheme,
    pub mode: RunMode,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub generator: Option<&'static str>,
    pub records: Vec<IterationRecord>,
    /// Per-round counts, Monte Carlo only.
    pub empirical: Vec<EmpiricalCounts>,
}

impl RunSummary {
    pub fn empirical_success_frequency(&self, j: usize) -> Option<f64> {
        let trials = self.trials? as f64;
        self.empirical
            .get(j.checked_sub(1)?)
            .map(|c| c.successes as f64 / trials)
    }

    pub fn empirical_cumulative_frequency(&self, j: usize) -> Option<f64> {
        let trials = self.trials? as f64;
        let n = j.min(self.empirical.len());
        Some(self.empirical[..n].iter().map(|c| c.successes).sum::<u64>() as f64 / trials)
    }

    pub fn to_json(&self) -> Value {
        let mut scheme = Map::new();
        let s = &self.scheme;
        scheme.insert("variant".into(), json!(s.variant.name()));
        scheme.insert("statistics".into(), json!(s.statistics));
        if let Variant::NonReset {
            channel,
            init,
            bath,
            time,
        } = s.variant
        {
            scheme.insert("channel".into(), json!(channel));
            scheme.insert("a".into(), json!(round15(init.a())));
            scheme.insert("phi".into(), json!(round15(init.phi())));
            scheme.insert("gamma".into(), json!(round15(bath.gamma)));
            scheme.insert("lambda".into(), json!(round15(bath.lambda)));
            scheme.insert("omega0".into(), json!(round15(bath.omega0)));
            scheme.insert("t".into(), json!(round15(time)));
            if let Ok(p) = disturbance_probability(&bath, time) {
                scheme.insert("p_disturb".into(), json!(round15(p)));
            }
        }
        scheme.insert("apply_pr_before_bs".into(), json!(s.apply_pr_before_bs));
        scheme.insert("target_parity".into(), json!(s.target_parity));
        scheme.insert("max_iterations".into(), json!(s.max_iterations));

        let iterations: Vec<Value> = self
            .records
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let mut it = Map::new();
                it.insert("j".into(), json!(r.j));
                it.insert("p_odd".into(), json!(round15(r.p_odd)));
                it.insert("p_even".into(), json!(round15(r.p_even)));
                it.insert(
                    "success_this_round".into(),
                    json!(round15(r.success_this_round)),
                );
                it.insert(
                    "cumulative_success".into(),
                    json!(round15(r.cumulative_success)),
                );
                it.insert(
                    "fidelity_to_target".into(),
                    json!(round15(r.fidelity_to_target)),
                );
                it.insert("target_label".into(), json!(r.target));
                it.insert("purity".into(), json!(r.purity.map(round15)));
                it.insert(
                    "distilled_state".into(),
                    r.distilled_state.as_ref().map_or(Value::Null, density_json),
                );
                if let Some(c) = self.empirical.get(k) {
                    it.insert("reached".into(), json!(c.reached));
                    it.insert("count_odd".into(), json!(c.odd));
                    it.insert("count_even".into(), json!(c.even));
                    it.insert(
                        "empirical_success".into(),
                        json!(self.empirical_success_frequency(r.j).map(round15)),
                    );
                    it.insert(
                        "empirical_cumulative".into(),
                        json!(self.empirical_cumulative_frequency(r.j).map(round15)),
                    );
                }
                Value::Object(it)
            })
            .collect();

        let mut root = Map::new();
        root.insert("scheme".into(), Value::Object(scheme));
        root.insert("mode".into(), json!(self.mode.as_str()));
        if let Some(t) = self.trials {
            root.insert("trials".into(), json!(t));
        }
        if let Some(seed) = self.seed {
            root.insert("seed".into(), json!(seed));
        }
        if let Some(g) = self.generator {
            root.insert("generator".into(), json!(g));
        }
        root.insert("iterations".into(), Value::Array(iterations));
        Value::Object(root)
    }
}

/// Nonzero entries as [{"row", "col", "re", "im"}], rows and columns named
/// by occupation strings such as "1001".
pub fn density_json(rho: &DensityOperator) -> Value {
    let m = rho.matrix();
    let names: Vec<String> = rho
        .basis()
        .states()
        .iter()
        .map(|o| o.0.iter().map(|n| n.to_string()).collect())
        .collect();
    let mut entries = Vec::new();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            if z.norm() > 1e-15 {
                entries.push(json!({
                    "row": names[r],
                    "col": names[c],
                    "re": round15(z.re),
                    "im": round15(z.im),
                }));
            }
        }
    }
    Value::Array(entries)
}

fn record(
    j: usize,
    measurement: ParityMeasurement,
    target_parity: Parity,
    fixed_target: Option<Reference>,
    success_this_round: f64,
    cumulative_success: f64,
) -> IterationRecord {
    let branch = measurement.branch(target_parity);
    let distilled_state = branch.conditional_state.clone();
    let (target, fidelity_to_target) = match (&distilled_state, fixed_target) {
        (Some(rho), Some(r)) => {
            let psi = r
                .state(rho.statistics())
                .expect("target valid for statistics");
            (
                r,
                rho.expectation(&psi).expect("same sector").clamp(0.0, 1.0),
            )
        }
        (Some(rho), None) => dominant_reference(rho),
        (None, r) => (r.unwrap_or(Reference::Ground), 0.0),
    };
    IterationRecord {
        j,
        p_odd: measurement.odd.probability,
        p_even: measurement.even.probability,
        success_this_round,
        cumulative_success,
        purity: distilled_state.as_ref().map(DensityOperator::purity),
        distilled_state,
        fidelity_to_target,
        target,
        measurement,
    }
}

/// Deterministic density-matrix recursion over the scheme's rounds.
pub fn run_exact(scheme: &ProtocolScheme) -> Result<RunSummary> {
    scheme.validate()?;
    let stats = scheme.statistics;
    let bs = beam_splitter(stats);
    let target = scheme.target_parity;
    let mut records = Vec::new();

    match scheme.variant {
        Variant::NonReset {
            channel,
            init,
            bath,
            time,
        } => {
            let p = disturbance_probability(&bath, time)?;
            let rho = post_bs_state(Scenario::NonReset(channel), stats, &init, p)?;
            let m = parity_measure(&rho);
            let success = m.branch(target).probability;
            records.push(record(1, m, target, None, success, success));
        }
        Variant::ResetDepolarize | Variant::ResetAmplitudeDamp => {
            let kind = if scheme.variant == Variant::ResetDepolarize {
                ChannelKind::Depolarizing
            } else {
                ChannelKind::AmplitudeDamping
            };
            let fixed_target = reset_target(&scheme.variant, stats, target);
            let rotator = if scheme.apply_pr_before_bs {
                Some(lift_element(ElementSpec::Pr { target: Spatial::L }, stats)?)
            } else {
                None
            };
            let mut reach = 1.0;
            let mut cumulative = 0.0;
            let mut incoming: Option<DensityOperator> = None;
            for j in 1..=scheme.max_iterations {
                let mut rho = match &incoming {
                    None if kind == ChannelKind::Depolarizing => reset_depolarize(stats),
                    None => reset_amplitude_damp(stats),
                    Some(prev) => evolve(kind, prev, 1.0)?,
                };
                if let Some(pr) = &rotator {
                    rho = apply_to_density(pr, &rho)?;
                }
                rho = apply_to_density(&bs, &rho)?;
                let m = parity_measure(&rho);
                let success = reach * m.branch(target).probability;
                cumulative += success;
                let rest = m.branch(target.other()).clone();
                records.push(record(j, m, target, fixed_target, success, cumulative));
                reach *= rest.probability;
                let Some(remainder) = rest.conditional_state else {
                    break;
                };
                // even-parity leftovers go back through the BS before the reset
                incoming = Some(if remainder.leakage_outside(ParityClass::LR) <= TOL {
                    remainder
                } else {
                    apply_to_density(&bs, &remainder)?
                });
            }
        }
    }

    Ok(RunSummary {
        scheme: *scheme,
        mode: RunMode::Exact,
        trials: None,
        seed: None,
        generator: None,
        records,
        empirical: Vec::new(),
    })
}

fn simulate_chunk(
    seed: u64,
    chunk: u64,
    trials: u64,
    p_odd: &[f64],
    target: Parity,
) -> Vec<EmpiricalCounts> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let mut counts = vec![EmpiricalCounts::default(); p_odd.len()];
    for _ in 0..trials {
        for (round, &q) in p_odd.iter().enumerate() {
            let c = &mut counts[round];
            c.reached += 1;
            let parity = if rng.random::<f64>() < q {
                Parity::Odd
            } else {
                Parity::Even
            };
            match parity {
                Parity::Odd => c.odd += 1,
                Parity::Even => c.even += 1,
            }
            if parity == target {
                c.successes += 1;
                break;
            }
        }
    }
    counts
}

/// Samples parity outcomes with the exact per-round branch probabilities.
/// Trials are split into fixed chunks with one generator stream each, so the
/// result does not depend on how many threads run them.
pub fn run_monte_carlo(scheme: &ProtocolScheme, trials: u64, seed: u64) -> Result<RunSummary> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let mut summary = run_exact(scheme)?;
    let p_odd: Vec<f64> = summary.records.iter().map(|r| r.p_odd).collect();
    let chunks = trials.div_ceil(MC_CHUNK);
    let target = scheme.target_parity;
    let per_chunk: Vec<Vec<EmpiricalCounts>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let n = MC_CHUNK.min(trials - c * MC_CHUNK);
            simulate_chunk(seed, c, n, &p_odd, target)
        })
        .collect();
    let mut empirical = vec![EmpiricalCounts::default(); p_odd.len()];
    for chunk in per_chunk {
        for (acc, c) in empirical.iter_mut().zip(chunk) {
            acc.reached += c.reached;
            acc.odd += c.odd;
            acc.even += c.even;
            acc.successes += c.successes;
        }
    }
    summary.mode = RunMode::MonteCarlo;
    summary.trials = Some(trials);
    summary.seed = Some(seed);
    summary.generator = Some(MC_GENERATOR);
    summary.empirical = empirical;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    const B: Statistics = Statistics::Boson;
    const F: Statistics = Statistics::Fermion;

    #[test]
    fn initial_state_validation() {
        assert!(InitialStateParams::new(1.2, 0.0).is_err());
        assert!(InitialStateParams::new(-0.1, 0.0).is_err());
        let p = InitialStateParams::new(0.6, 3.0 * PI).unwrap();
        assert!((p.phi() - PI).abs() < 1e-12);
        assert!((p.b() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn singlet_initial_state() {
        let init = InitialStateParams::new(FRAC_1_SQRT_2, PI).unwrap();
        let psi = init.state(F);
        let singlet = named_state(NamedLabel::OneMinusLR, F).unwrap();
        assert!((psi.overlap(&singlet).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scheme_validation() {
        let mut s = ProtocolScheme::reset_depolarize(F, 3);
        s.target_parity = Parity::Odd;
        assert!(matches!(s.validate(), Err(Error::InvalidScheme(_))));
        let init = InitialStateParams::new(0.5, 0.0).unwrap();
        let mut nr = ProtocolScheme::non_reset(
            B,
            ChannelKind::PhaseDamping,
            init,
            BathParams::default(),
            1.0,
        );
        nr.max_iterations = 3;
        assert!(matches!(nr.validate(), Err(Error::InvalidScheme(_))));
        let mut ad = ProtocolScheme::reset_amplitude_damp(F, Parity::Odd, 2);
        ad.apply_pr_before_bs = false;
        assert!(matches!(ad.validate(), Err(Error::InvalidScheme(_))));
        let zero = ProtocolScheme::reset_depolarize(B, 0);
        assert!(zero.validate().is_err());
    }

    #[test]
    fn depolarize_reset_fermion_second_round() {
        let run = run_exact(&ProtocolScheme::reset_depolarize(F, 2)).unwrap();
        assert!((run.records[0].success_this_round - 0.25).abs() < 1e-12);
        assert!((run.records[1].success_this_round - 0.25 * 0.75).abs() < 1e-12);
        assert!((run.records[1].cumulative_success - 7.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn depolarize_reset_boson_reinjects_even_branch() {
        let run = run_exact(&ProtocolScheme::reset_depolarize(B, 5)).unwrap();
        for r in &run.records {
            assert!((r.p_odd - 0.25).abs() < 1e-12);
            assert!((r.fidelity_to_target - 1.0).abs() < 1e-12);
            assert_eq!(r.target, Reference::Named(NamedLabel::OneMinusLR));
        }
        assert!((run.records[4].cumulative_success - (1.0 - 0.75f64.powi(5))).abs() < 1e-12);
    }

    #[test]
    fn amplitude_reset_both_targets() {
        for s in Statistics::ALL {
            for parity in [Parity::Odd, Parity::Even] {
                let run = run_exact(&ProtocolScheme::reset_amplitude_damp(s, parity, 4)).unwrap();
                for r in &run.records {
                    assert!((r.p_odd - 0.5).abs() < 1e-12);
                    assert!((r.purity.unwrap() - 1.0).abs() < 1e-12);
                    assert!((r.fidelity_to_target - 1.0).abs() < 1e-12, "{s} {parity}");
                }
                assert!((run.records[3].cumulative_success - (1.0 - 0.5f64.powi(4))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn separable_input_under_phase_damping_is_even_odds() {
        for phi in [0.0, 1.0, PI] {
            let init = InitialStateParams::new(0.0, phi).unwrap();
            for t in [0.0, 0.7, 5.0] {
                let s = ProtocolScheme::non_reset(
                    B,
                    ChannelKind::PhaseDamping,
                    init,
                    BathParams::default(),
                    t,
                );
                let r = &run_exact(&s).unwrap().records[0];
                assert!((r.p_odd - 0.5).abs() < 1e-12);
                assert!((r.p_even - 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let singlet = InitialStateParams::new(FRAC_1_SQRT_2, PI).unwrap();
        for p in [0.0, 0.4, 1.0] {
            let v = closed_form_probability(
                Scenario::NonReset(ChannelKind::PhaseDamping),
                B,
                &singlet,
                p,
            )
            .unwrap();
            assert!((v.odd - (0.5 + (1.0 - p) / 2.0)).abs() < 1e-15);
        }
        for a in [0.0, 0.3, 0.9] {
            let init = InitialStateParams::new(a, PI / 2.0).unwrap();
            let v = closed_form_probability(
                Scenario::NonReset(ChannelKind::Depolarizing),
                B,
                &init,
                0.6,
            )
            .unwrap();
            assert!((v.odd - (0.5 - 0.15)).abs() < 1e-15);
        }
        let bell = InitialStateParams::new(FRAC_1_SQRT_2, 0.0).unwrap();
        let v = closed_form_probability(
            Scenario::NonReset(ChannelKind::AmplitudeDamping),
            B,
            &bell,
            1.0,
        )
        .unwrap();
        assert!(v.odd.abs() < 1e-15);
        assert!(closed_form_probability(Scenario::ResetDepolarize, B, &bell, 1.5).is_err());
    }

    #[test]
    fn dominant_reference_picks_ground_state() {
        let g = ground_state(F).density();
        let (r, f) = dominant_reference(&g);
        // |L↓,R↓⟩ has fidelity 1/2 with |2±⟩ but 1 with itself
        assert_eq!(r, Reference::Ground);
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let s = ProtocolScheme::reset_depolarize(F, 6);
        let a = run_monte_carlo(&s, 1, 42).unwrap();
        let b = run_monte_carlo(&s, 1, 42).unwrap();
        assert_eq!(a.empirical, b.empirical);
        assert_eq!(
            a.empirical.iter().map(|c| c.successes).sum::<u64>() <= 1,
            true
        );
        assert!(run_monte_carlo(&s, 0, 1).is_err());
    }

    #[test]
    fn json_layout() {
        let run = run_exact(&ProtocolScheme::reset_amplitude_damp(F, Parity::Odd, 1)).unwrap();
        let v = run.to_json();
        assert_eq!(v["mode"], "exact");
        assert_eq!(v["scheme"]["variant"], "reset-ad");
        assert_eq!(v["iterations"][0]["p_odd"], 0.5);
        assert_eq!(v["iterations"][0]["target_label"], "1+LR");
        assert!(v.get("seed").is_none());
    }
}
