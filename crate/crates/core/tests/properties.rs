mod common;

use std::collections::BTreeSet;

use compocheck::ingest::{parse_dsl, parse_json, serialize_json};
use compocheck::integrity::synthesize_deleg_associations;
use compocheck::model::{ConnectorId, Model, DELEG_PREFIX};
use compocheck::sim::{self, Status};
use compocheck::types::{LinkEnd, LinkKind, LinkOrigin, TypeSystem};
use proptest::prelude::*;

fn plain_count(model: &Model) -> usize {
    model.interfaces.iter().filter(|i| !i.is_group).count()
}

/// Interfaces at one link end, computed with the brute-force oracles.
fn oracle_end(model: &Model, end: LinkEnd<'_>) -> BTreeSet<String> {
    let parents = common::oracle_parents(model);
    match end {
        LinkEnd::Part(p) => common::oracle_class_interfaces(model, &parents, &p.ty),
        LinkEnd::PartPort(_, port) | LinkEnd::OwnPort(port) => {
            common::oracle_closure(model, &parents, &port.contract)
        }
    }
}

const ENDS: [&str; 8] = ["x", "y", "self.p", "self.r", "x.p", "x.r", "y.p", "y.r"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        for model in [common::well_formed(seed), common::random_dag(seed), common::random_fanout(seed).0] {
            let text = serialize_json(&model);
            let back = parse_json(&text).expect("serialized model parses");
            prop_assert_eq!(&back, &model);
            prop_assert_eq!(serialize_json(&back), text);
        }
    }

    #[test]
    fn dsl_and_json_agree(seed in any::<u64>()) {
        let model = common::well_formed(seed);
        let dsl = common::to_dsl(&model);
        let from_dsl = parse_dsl(&dsl).expect("printed DSL parses");
        prop_assert_eq!(&from_dsl, &model);
        prop_assert_eq!(parse_dsl(&dsl).expect("parses"), from_dsl);
    }

    #[test]
    fn synthesis_is_idempotent(seed in any::<u64>()) {
        let model = common::random_dag(seed);
        let once = synthesize_deleg_associations(&model).expect("no deleg associations declared");
        let twice = synthesize_deleg_associations(&once).expect("still well shaped");
        prop_assert_eq!(&once, &twice);
        let delegs = once.associations.iter().filter(|a| a.name.starts_with(DELEG_PREFIX)).count();
        prop_assert_eq!(delegs, plain_count(&model));
    }

    #[test]
    fn untyped_transport_is_end_intersection(seed in any::<u64>()) {
        for model in [common::well_formed(seed), common::random_fanout(seed).0] {
            let ts = TypeSystem::new(&model);
            for link in ts.links() {
                if link.is_typed() || !link.transported.computable {
                    continue;
                }
                let e1 = oracle_end(&model, link.end1);
                let e2 = oracle_end(&model, link.end2);
                let want: BTreeSet<String> = e1.intersection(&e2).cloned().collect();
                let got: BTreeSet<String> = link.transported.interfaces.iter().map(|s| s.to_string()).collect();
                prop_assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn transported_sets_hold_no_groups(seed in any::<u64>()) {
        let (model, _) = common::random_fanout(seed);
        let ts = TypeSystem::new(&model);
        for link in ts.links() {
            for i in &link.transported.interfaces {
                prop_assert!(!model.interface(i).expect("declared").is_group);
            }
        }
    }

    #[test]
    fn origin_defined_iff_not_forbidden(a in 0..ENDS.len(), b in 0..ENDS.len()) {
        prop_assume!(a != b);
        let src = format!(
            "interface K {{}} class P {{ realizes K; port p: K; port r: K reversed; }} \
             class A {{ port p: K; port r: K reversed; part x: P; part y: P; connector {}, {}; }}",
            ENDS[a], ENDS[b]
        );
        let model = parse_dsl(&src).expect("parses");
        let ts = TypeSystem::new(&model);
        let id = ConnectorId { class: 1, index: 0 };
        let forbidden = ts.classify_link(id) == LinkKind::Forbidden;
        prop_assert_eq!(forbidden, ts.link_origin(id) == LinkOrigin::Undirected);
        prop_assert_eq!(forbidden, !ts.transported_interfaces(id).computable && ts.classify_link(id) != LinkKind::AssemblyPartPart);
    }

    #[test]
    fn interface_compatibility_is_a_preorder(seed in any::<u64>()) {
        let model = common::random_dag(seed);
        let ts = TypeSystem::new(&model);
        let names: Vec<&str> = model.interfaces.iter().map(|i| i.name.as_str()).collect();
        for a in &names {
            prop_assert!(ts.classifier_compatible(a, a));
            for b in &names {
                for c in &names {
                    if ts.classifier_compatible(a, b) && ts.classifier_compatible(b, c) {
                        prop_assert!(ts.classifier_compatible(a, c), "{a} <= {b} <= {c}");
                    }
                }
            }
        }
    }

    #[test]
    fn hops_bounded_by_port_count(seed in any::<u64>()) {
        let model = common::well_formed(seed);
        let root = model.root.clone().expect("root");
        let mut graph = sim::instantiate(&model, &root).expect("instantiates");
        for (h, i) in graph.full_injections() {
            graph.inject(h, &i, None).expect("accepted");
        }
        let bound = graph.ports.len();
        let trace = graph.run_to_quiescence().expect("terminates");
        for o in &trace.outcomes {
            prop_assert!(o.hops <= bound);
            prop_assert!(o.status != Status::InTransit);
        }
    }

    #[test]
    fn traces_are_deterministic(seed in any::<u64>()) {
        let model = common::well_formed(seed);
        let root = model.root.clone().expect("root");
        let (_, t1, r1) = sim::simulate(&model, &root, None).expect("runs");
        let (_, t2, r2) = sim::simulate(&model, &root, None).expect("runs");
        prop_assert_eq!(t1.to_json_lines(), t2.to_json_lines());
        prop_assert_eq!(r1, r2);
    }
}

#[test]
fn group_contract_port_carries_only_plain_interfaces() {
    let (model, _) = common::random_fanout(7);
    let ts = TypeSystem::new(&model);
    let a = model.class("A").expect("A");
    let carried = ts.port_interfaces(&a.ports[0]);
    assert_eq!(carried.len(), 10);
    assert!(!carried.contains("All"));
}
