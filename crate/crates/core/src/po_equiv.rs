//! Passive-optical equivalence: breadth-first closure of named states under a
//! finite set of PO elements, modulo global phase.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::elements::{apply_to_state, lift_element, ElementSpec, LiftedOperator};
use crate::error::{Error, Result};
use crate::fock::{named_state, NamedLabel, Pseudospin, Spatial, StateVector, Statistics};

/// Grid used to hash amplitudes after phase normalization.
pub const QUANTUM: f64 = 1e-9;
/// Replay and labeling tolerance.
pub const PHASE_TOL: f64 = 1e-9;
pub const DEFAULT_DEPTH: usize = 6;
pub const DEFAULT_THETAS: [f64; 3] = [PI, FRAC_PI_2, 3.0 * FRAC_PI_2];

pub const FERMION_CAPTION_NOTE: &str = "the fermionic figure caption speaks of two sets of PO-equivalent \
states while the text concludes that all six fermionic maximally entangled states are PO equivalent; \
the search tests the latter";

/// Phase-normalized, quantized amplitudes: hashable and phase-blind.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalState {
    statistics: Statistics,
    grid: Vec<(i64, i64)>,
}

impl CanonicalState {
    pub fn new(psi: &StateVector) -> Self {
        let amps = psi.amplitudes();
        let ph = amps
            .iter()
            .find(|z| z.norm() > QUANTUM)
            .map(|z| z.conj() / z.norm())
            .unwrap_or(Complex64::new(1.0, 0.0));
        let q = |x: f64| {
            let v = (x / QUANTUM).round() as i64;
            // avoid distinct keys for ±0
            if v == 0 {
                0
            } else {
                v
            }
        };
        let grid = amps
            .iter()
            .map(|z| z * ph)
            .map(|z| (q(z.re), q(z.im)))
            .collect();
        CanonicalState {
            statistics: psi.statistics(),
            grid,
        }
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }
}

/// Labeled generators for `statistics`: BS, PR(L), PR(R), PBS, then PIPS at each
/// θ and spatial mode, then PDPS at each θ, spatial mode and pseudospin.
pub fn generator_specs(thetas: &[f64]) -> Result<Vec<ElementSpec>> {
    if thetas.is_empty() {
        return Err(Error::InvalidParameter(
            "theta list must be non-empty".into(),
        ));
    }
    let mut specs = vec![
        ElementSpec::Bs,
        ElementSpec::Pr { target: Spatial::L },
        ElementSpec::Pr { target: Spatial::R },
        ElementSpec::Pbs,
    ];
    for &theta in thetas {
        for target in [Spatial::L, Spatial::R] {
            specs.push(ElementSpec::Pips { theta, target });
        }
    }
    for &theta in thetas {
        for target in [Spatial::L, Spatial::R] {
            for pseudospin in [Pseudospin::Up, Pseudospin::Down] {
                specs.push(ElementSpec::Pdps {
                    theta,
                    target,
                    pseudospin,
                });
            }
        }
    }
    Ok(specs)
}

pub fn generator_set(statistics: Statistics, thetas: &[f64]) -> Result<Vec<LiftedOperator>> {
    generator_specs(thetas)?
        .into_iter()
        .map(|s| lift_element(s, statistics))
        .collect()
}

/// Named state equal to `psi` up to phase (fidelity > 1 − 1e-9), if any.
pub fn nearest_label(psi: &StateVector) -> Option<NamedLabel> {
    NamedLabel::for_statistics(psi.statistics())
        .into_iter()
        .find(|&l| {
            let phi = named_state(l, psi.statistics()).expect("label valid");
            phi.overlap(psi)
                .map(|o| o.norm_sqr() > 1.0 - PHASE_TOL)
                .unwrap_or(false)
        })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoPath {
    pub start: NamedLabel,
    pub end: Option<NamedLabel>,
    pub elements: Vec<ElementSpec>,
}

impl PoPath {
    pub fn replay(&self, statistics: Statistics) -> Result<StateVector> {
        let mut psi = named_state(self.start, statistics)?;
        for &e in &self.elements {
            psi = apply_to_state(&lift_element(e, statistics)?, &psi)?;
        }
        Ok(psi)
    }

    pub fn describe(&self) -> String {
        let els: Vec<String> = self.elements.iter().map(ToString::to_string).collect();
        let end = self.end.map_or_else(|| "?".to_string(), |l| l.to_string());
        if els.is_empty() {
            format!("{} = {end}", self.start)
        } else {
            format!("{} -[{}]-> {end}", self.start, els.join(", "))
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReachEntry {
    pub key: CanonicalState,
    pub state: StateVector,
    pub path: PoPath,
}

/// Shortest-path closure, in discovery order.
#[derive(Clone, Debug)]
pub struct Reach {
    pub statistics: Statistics,
    pub max_depth: usize,
    pub entries: Vec<ReachEntry>,
    index: HashMap<CanonicalState, usize>,
}

impl Reach {
    pub fn get(&self, key: &CanonicalState) -> Option<&ReachEntry> {
        self.index.get(key).map(|&i| &self.entries[i])
    }

    /// Shortest path to a named state, if it was reached.
    pub fn path_to(&self, label: NamedLabel) -> Option<&PoPath> {
        let psi = named_state(label, self.statistics).ok()?;
        self.get(&CanonicalState::new(&psi)).map(|e| &e.path)
    }

    pub fn reached_labels(&self) -> Vec<NamedLabel> {
        let mut v: Vec<NamedLabel> = self.entries.iter().filter_map(|e| e.path.end).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn reach(start: NamedLabel, statistics: Statistics, max_depth: usize) -> Result<Reach> {
    reach_with(start, statistics, max_depth, &DEFAULT_THETAS)
}

pub fn reach_with(
    start: NamedLabel,
    statistics: Statistics,
    max_depth: usize,
    thetas: &[f64],
) -> Result<Reach> {
    let specs = generator_specs(thetas)?;
    let gens = generator_set(statistics, thetas)?;
    let psi0 = named_state(start, statistics)?;
    let key0 = CanonicalState::new(&psi0);
    let mut entries = vec![ReachEntry {
        key: key0.clone(),
        path: PoPath {
            start,
            end: Some(start),
            elements: Vec::new(),
        },
        state: psi0,
    }];
    let mut index = HashMap::from([(key0, 0usize)]);
    let mut frontier = vec![0usize];
    for _ in 0..max_depth {
        let mut next = Vec::new();
        for &i in &frontier {
            for (spec, g) in specs.iter().zip(&gens) {
                let psi = apply_to_state(g, &entries[i].state)?;
                let key = CanonicalState::new(&psi);
                if index.contains_key(&key) {
                    continue;
                }
                let mut elements = entries[i].path.elements.clone();
                elements.push(*spec);
                let path = PoPath {
                    start,
                    end: nearest_label(&psi),
                    elements,
                };
                index.insert(key.clone(), entries.len());
                next.push(entries.len());
                entries.push(ReachEntry {
                    key,
                    state: psi,
                    path,
                });
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(Reach {
        statistics,
        max_depth,
        entries,
        index,
    })
}

/// Whether `path` replayed from its start reproduces `target` up to phase.
pub fn replays_to(path: &PoPath, target: &StateVector) -> Result<bool> {
    let psi = path.replay(target.statistics())?;
    Ok(psi.phase_relative_to(target, PHASE_TOL).is_some())
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeCheck {
    pub from: NamedLabel,
    pub to: NamedLabel,
    /// Element family named for this edge.
    pub stated: String,
    /// Whether the stated element itself maps `from` onto `to`.
    pub stated_realizes: bool,
    /// Element used to realize the edge.
    pub applied: ElementSpec,
    /// e^{iα} with applied·from = e^{iα}·to, when it holds.
    pub forward_phase: Option<Complex64>,
    pub backward_phase: Option<Complex64>,
    pub note: Option<String>,
}

impl EdgeCheck {
    pub fn passed(&self) -> bool {
        self.forward_phase.is_some() && self.backward_phase.is_some()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeReport {
    pub statistics: Statistics,
    pub edges: Vec<EdgeCheck>,
    pub caption_note: Option<&'static str>,
}

impl EdgeReport {
    pub fn all_passed(&self) -> bool {
        self.edges.iter().all(EdgeCheck::passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("stated PO edges ({})\n", self.statistics);
        for e in &self.edges {
            let ph = |p: Option<Complex64>| p.map_or_else(|| "-".to_string(), |z| format_phase(z));
            let _ = writeln!(
                out,
                "{} {} <-> {} via {} (stated {}): phase {} / {}{}",
                if e.passed() { "PASS" } else { "FAIL" },
                e.from,
                e.to,
                e.applied,
                e.stated,
                ph(e.forward_phase),
                ph(e.backward_phase),
                e.note.as_ref().map_or(String::new(), |n| format!("; {n}")),
            );
        }
        if let Some(n) = self.caption_note {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }
}

/// e^{iα} printed as a multiple of π.
pub fn format_phase(z: Complex64) -> String {
    let a = z.arg().rem_euclid(2.0 * PI);
    let a = if (2.0 * PI - a).abs() < 1e-9 { 0.0 } else { a };
    if a.abs() < 1e-9 {
        "0".into()
    } else {
        crate::elements::format_angle(a)
    }
}

fn check_edge(
    statistics: Statistics,
    from: NamedLabel,
    to: NamedLabel,
    stated: ElementSpec,
    applied: ElementSpec,
) -> Result<EdgeCheck> {
    let a = named_state(from, statistics)?;
    let b = named_state(to, statistics)?;
    let op = lift_element(applied, statistics)?;
    let forward_phase = apply_to_state(&op, &a)?
        .phase_relative_to(&b, PHASE_TOL)
        .map(|z| z.conj());
    let backward_phase = apply_to_state(&op, &b)?
        .phase_relative_to(&a, PHASE_TOL)
        .map(|z| z.conj());
    let stated_op = lift_element(stated, statistics)?;
    let stated_image = apply_to_state(&stated_op, &a)?;
    let stated_realizes = stated_image.phase_relative_to(&b, PHASE_TOL).is_some();
    let note = if stated_realizes {
        None
    } else if let Some(z) = stated_image.phase_relative_to(&a, PHASE_TOL) {
        Some(format!(
            "{stated} only multiplies {from} by the global phase e^(i {})",
            format_phase(z.conj())
        ))
    } else {
        Some(format!("{stated} does not map {from} onto {to}"))
    };
    Ok(EdgeCheck {
        from,
        to,
        stated: stated.to_string(),
        stated_realizes,
        applied,
        forward_phase,
        backward_phase,
        note,
    })
}

/// The six explicitly stated edges. A phase shifter of π on one whole spatial
/// mode only contributes a global sign on one-particle-per-mode states, so
/// those two edges are realized with the same phase on a single pseudospin
/// component.
pub fn verify_stated_edges(statistics: Statistics) -> Result<EdgeReport> {
    use NamedLabel::*;
    let pips_pi = ElementSpec::Pips {
        theta: PI,
        target: Spatial::L,
    };
    let pdps_pi = ElementSpec::Pdps {
        theta: PI,
        target: Spatial::L,
        pseudospin: Pseudospin::Down,
    };
    let pips_half = ElementSpec::Pips {
        theta: FRAC_PI_2,
        target: Spatial::L,
    };
    let pr = ElementSpec::Pr { target: Spatial::L };
    let bs_edge = match statistics {
        Statistics::Fermion => (OneMinusLR, OneMinusNO),
        Statistics::Boson => (OnePlusLR, OneMinusNO),
    };
    let edges = [
        (OneMinusLR, OnePlusLR, pips_pi, pdps_pi),
        (TwoMinusLR, TwoPlusLR, pips_pi, pdps_pi),
        (OneMinusNO, OnePlusNO, pips_half, pips_half),
        (OneMinusLR, TwoMinusLR, pr, pr),
        (OnePlusLR, TwoPlusLR, pr, pr),
        (bs_edge.0, bs_edge.1, ElementSpec::Bs, ElementSpec::Bs),
    ]
    .into_iter()
    .map(|(f, t, s, a)| check_edge(statistics, f, t, s, a))
    .collect::<Result<Vec<_>>>()?;
    Ok(EdgeReport {
        statistics,
        edges,
        caption_note: (statistics == Statistics::Fermion).then_some(FERMION_CAPTION_NOTE),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphNode {
    pub id: usize,
    pub label: Option<NamedLabel>,
    pub component: usize,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphEdge {
    pub from: usize,
    pub to: usize,
    pub element: ElementSpec,
}

/// Bounded closure of all named states of one statistics. Self-loops are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct PoGraph {
    pub statistics: Statistics,
    pub max_depth: usize,
    pub generators: Vec<ElementSpec>,
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
    pub component_count: usize,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

pub fn po_graph(statistics: Statistics, max_depth: usize) -> Result<PoGraph> {
    let specs = generator_specs(&DEFAULT_THETAS)?;
    let gens = generator_set(statistics, &DEFAULT_THETAS)?;
    let mut states: Vec<StateVector> = Vec::new();
    let mut depth: Vec<usize> = Vec::new();
    let mut index: HashMap<CanonicalState, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    for l in NamedLabel::for_statistics(statistics) {
        let psi = named_state(l, statistics)?;
        let key = CanonicalState::new(&psi);
        if !index.contains_key(&key) {
            index.insert(key, states.len());
            queue.push_back(states.len());
            states.push(psi);
            depth.push(0);
        }
    }
    let mut edges = Vec::new();
    while let Some(i) = queue.pop_front() {
        if depth[i] >= max_depth {
            continue;
        }
        for (spec, g) in specs.iter().zip(&gens) {
            let psi = apply_to_state(g, &states[i])?;
            let key = CanonicalState::new(&psi);
            let j = match index.get(&key) {
                Some(&j) => j,
                None => {
                    let j = states.len();
                    index.insert(key, j);
                    states.push(psi);
                    depth.push(depth[i] + 1);
                    queue.push_back(j);
                    j
                }
            };
            if j != i {
                edges.push(GraphEdge {
                    from: i,
                    to: j,
                    element: *spec,
                });
            }
        }
    }
    let mut parent: Vec<usize> = (0..states.len()).collect();
    for e in &edges {
        let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    // components numbered by first appearance
    let mut comp_ids: BTreeMap<usize, usize> = BTreeMap::new();
    let mut nodes = Vec::with_capacity(states.len());
    for (id, psi) in states.iter().enumerate() {
        let root = find(&mut parent, id);
        let next = comp_ids.len();
        let component = *comp_ids.entry(root).or_insert(next);
        nodes.push(GraphNode {
            id,
            label: nearest_label(psi),
            component,
            depth: depth[id],
        });
    }
    Ok(PoGraph {
        statistics,
        max_depth,
        generators: specs,
        component_count: comp_ids.len(),
        nodes,
        edges,
    })
}

impl PoGraph {
    pub fn component_of(&self, label: NamedLabel) -> Option<usize> {
        self.nodes
            .iter()
            .find(|n| n.label == Some(label))
            .map(|n| n.component)
    }

    /// Labels grouped by component, components in ascending order.
    pub fn label_components(&self) -> Vec<(usize, Vec<NamedLabel>)> {
        let mut m: BTreeMap<usize, Vec<NamedLabel>> = BTreeMap::new();
        for n in &self.nodes {
            if let Some(l) = n.label {
                m.entry(n.component).or_default().push(l);
            }
        }
        m.into_iter()
            .map(|(c, mut v)| {
                v.sort();
                v.dedup();
                (c, v)
            })
            .collect()
    }

    pub fn to_dot(&self) -> String {
        let mut out = format!("digraph po_{} {{\n", self.statistics);
        for n in &self.nodes {
            match n.label {
                Some(l) => {
                    let _ = writeln!(out, "  n{} [label=\"{}\", shape=box];", n.id, l);
                }
                None => {
                    let _ = writeln!(out, "  n{} [label=\"\", shape=point];", n.id);
                }
            }
        }
        for e in &self.edges {
            let _ = writeln!(out, "  n{} -> n{} [label=\"{}\"];", e.from, e.to, e.element);
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> Value {
        let mut adjacency: Vec<Vec<Value>> = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adjacency[e.from].push(json!({ "to": e.to, "element": e.element.to_string() }));
        }
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .zip(adjacency)
            .map(|(n, adj)| {
                json!({
                    "id": n.id,
                    "label": n.label.map(|l| l.to_string()),
                    "component": n.component,
                    "depth": n.depth,
                    "edges": adj,
                })
            })
            .collect();
        let components: Vec<Value> = self
            .label_components()
            .into_iter()
            .map(|(c, ls)| json!({ "component": c, "labels": ls }))
            .collect();
        let mut v = json!({
            "statistics": self.statistics,
            "max_depth": self.max_depth,
            "generators": self.generators.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "node_count": self.nodes.len(),
            "edge_count": self.edges.len(),
            "component_count": self.component_count,
            "labeled_components": components,
            "nodes": nodes,
        });
        if self.statistics == Statistics::Fermion {
            v["note"] = json!(FERMION_CAPTION_NOTE);
        }
        v
    }
}
