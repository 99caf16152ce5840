use parity_distill::elements::{apply_to_state, lift_element, ElementSpec};
use parity_distill::fock::{named_state, NamedLabel, Spatial, Statistics};
use parity_distill::po_equiv::{po_graph, reach, replays_to, verify_stated_edges, DEFAULT_DEPTH};

use NamedLabel::*;

#[test]
fn fermion_labels_all_connected_within_four() {
    let s = Statistics::Fermion;
    let labels = NamedLabel::for_statistics(s);
    assert_eq!(labels.len(), 6);
    for &start in &labels {
        let r = reach(start, s, 4).unwrap();
        for &l in &labels {
            let path = r
                .path_to(l)
                .unwrap_or_else(|| panic!("{start} does not reach {l}"));
            assert!(path.elements.len() <= 4);
            assert!(
                replays_to(path, &named_state(l, s).unwrap()).unwrap(),
                "{}",
                path.describe()
            );
        }
    }
}

#[test]
fn single_element_edges() {
    let f = Statistics::Fermion;
    let b = Statistics::Boson;
    let one = |start, target, s| {
        reach(start, s, 1)
            .unwrap()
            .path_to(target)
            .map(|p| p.elements.clone())
    };
    assert_eq!(one(OneMinusLR, OneMinusNO, f), Some(vec![ElementSpec::Bs]));
    assert_eq!(one(OnePlusLR, OneMinusNO, b), Some(vec![ElementSpec::Bs]));
    for s in Statistics::ALL {
        // PR(L) turns |↑↓⟩ − |↓↑⟩ into |↓↓⟩ − |↑↑⟩
        let pr = ElementSpec::Pr { target: Spatial::L };
        let psi = apply_to_state(
            &lift_element(pr, s).unwrap(),
            &named_state(OneMinusLR, s).unwrap(),
        )
        .unwrap();
        let phase = psi
            .phase_relative_to(&named_state(TwoMinusLR, s).unwrap(), 1e-12)
            .unwrap();
        assert!((phase + 1.0).norm() < 1e-12);
        assert!(one(OneMinusLR, TwoMinusLR, s).is_some());
        assert!(one(OnePlusLR, TwoPlusLR, s).is_some());
    }
}

#[test]
fn every_recorded_path_replays() {
    for s in Statistics::ALL {
        let r = reach(OneMinusLR, s, 4).unwrap();
        for e in &r.entries {
            assert!(replays_to(&e.path, &e.state).unwrap());
        }
    }
}

#[test]
fn reachability_is_symmetric() {
    for s in Statistics::ALL {
        let labels = NamedLabel::for_statistics(s);
        let reached: Vec<Vec<NamedLabel>> = labels
            .iter()
            .map(|&l| reach(l, s, 5).unwrap().reached_labels())
            .collect();
        for (i, &a) in labels.iter().enumerate() {
            for (j, &b) in labels.iter().enumerate() {
                assert_eq!(
                    reached[i].contains(&b),
                    reached[j].contains(&a),
                    "{s}: {a} vs {b}"
                );
            }
        }
    }
}

#[test]
fn stated_edges_hold() {
    for s in Statistics::ALL {
        let report = verify_stated_edges(s).unwrap();
        assert_eq!(report.edges.len(), 6);
        assert!(report.all_passed(), "{}", report.to_text());
        for e in &report.edges {
            let ph = e.forward_phase.unwrap();
            assert!((ph.norm() - 1.0).abs() < 1e-9);
        }
    }
    assert!(verify_stated_edges(Statistics::Fermion)
        .unwrap()
        .caption_note
        .is_some());
}

#[test]
fn boson_graph_splits_into_two_classes() {
    let g = po_graph(Statistics::Boson, DEFAULT_DEPTH).unwrap();
    assert_ne!(g.component_of(OneMinusLR), g.component_of(UPlusNO));
    assert_eq!(g.component_of(OneMinusLR), g.component_of(OnePlusNO));
    assert_eq!(g.component_of(UPlusNO), g.component_of(DMinusNO));
    assert_eq!(g.label_components().len(), 2);
    let r = reach(OneMinusLR, Statistics::Boson, DEFAULT_DEPTH).unwrap();
    for l in [UMinusNO, UPlusNO, DMinusNO, DPlusNO] {
        assert!(r.path_to(l).is_none());
    }
}

#[test]
fn fermion_graph_is_connected() {
    let g = po_graph(Statistics::Fermion, DEFAULT_DEPTH).unwrap();
    assert_eq!(g.component_count, 1);
    assert!(g.edges.iter().all(|e| e.from != e.to));
    let labelled = g.nodes.iter().filter(|n| n.label.is_some()).count();
    assert_eq!(labelled, 6);
}

#[test]
fn graph_outputs() {
    let g = po_graph(Statistics::Fermion, 3).unwrap();
    let dot = g.to_dot();
    assert!(dot.starts_with("digraph po_fermion {") && dot.ends_with("}\n"));
    assert!(dot.contains("label=\"1-LR\""));
    assert_eq!(dot.matches(" -> ").count(), g.edges.len());
    let j = g.to_json();
    assert_eq!(j["nodes"].as_array().unwrap().len(), g.nodes.len());
    assert!(j["note"].is_string());
    assert_eq!(
        g.to_dot(),
        po_graph(Statistics::Fermion, 3).unwrap().to_dot()
    );
    assert!(po_graph(Statistics::Boson, 2)
        .unwrap()
        .to_json()
        .get("note")
        .is_none());
}
