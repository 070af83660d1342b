//! Seeded model generators and brute-force oracles shared by the integration
//! tests. Every generator is a pure function of its seed.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use compocheck::model::{
    Association, AssociationEnd, Class, ClassKind, Connector, EndRef, Interface, Model, Part, Port,
    Span,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn iface(name: &str, generals: &[String], group: bool) -> Interface {
    Interface {
        name: name.to_string(),
        generals: generals.to_vec(),
        is_group: group,
        operations: vec![format!("{}_op", name.to_lowercase())],
        span: Span::none(),
    }
}

fn class(name: &str) -> Class {
    Class {
        name: name.to_string(),
        ..Class::default()
    }
}

fn port(name: &str, contract: &str, reversed: bool) -> Port {
    Port {
        name: name.to_string(),
        contract: contract.to_string(),
        reversed,
        span: Span::none(),
    }
}

fn part(name: &str, ty: &str) -> Part {
    Part {
        name: name.to_string(),
        ty: ty.to_string(),
        multiplicity: 1,
        span: Span::none(),
    }
}

fn connector(end1: EndRef, end2: EndRef, association: Option<&str>) -> Connector {
    Connector {
        end1,
        end2,
        association: association.map(str::to_string),
        span: Span::none(),
    }
}

fn assoc(name: &str, from: &str, to: &str) -> Association {
    let mut a = Association::deleg("X");
    a.name = name.to_string();
    a.synthesized = false;
    a.end1 = AssociationEnd {
        ty: from.to_string(),
        navigable: false,
    };
    a.end2 = AssociationEnd {
        ty: to.to_string(),
        navigable: true,
    };
    a
}

// ---------------------------------------------------------------- oracles

/// Transitive generals by iterating one-step generalization to a fixpoint.
pub fn oracle_parents(model: &Model) -> BTreeMap<String, BTreeSet<String>> {
    let mut direct: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for i in &model.interfaces {
        direct.insert(i.name.clone(), i.generals.iter().cloned().collect());
    }
    for c in &model.classes {
        direct.insert(c.name.clone(), c.generals.iter().cloned().collect());
    }
    let mut acc = direct.clone();
    loop {
        let mut changed = false;
        let names: Vec<String> = acc.keys().cloned().collect();
        for n in names {
            let current = acc[&n].clone();
            let mut next = current.clone();
            for p in &current {
                if let Some(pp) = direct.get(p) {
                    next.extend(pp.iter().cloned());
                }
                if let Some(pp) = acc.get(p) {
                    next.extend(pp.iter().cloned());
                }
            }
            if next != current {
                acc.insert(n, next);
                changed = true;
            }
        }
        if !changed {
            return acc;
        }
    }
}

fn is_plain(model: &Model, name: &str) -> bool {
    model.interfaces.iter().any(|i| i.name == name && !i.is_group)
}

/// `{i}` plus its parents, keeping only non-group interfaces.
pub fn oracle_closure(
    model: &Model,
    parents: &BTreeMap<String, BTreeSet<String>>,
    name: &str,
) -> BTreeSet<String> {
    std::iter::once(name.to_string())
        .chain(parents.get(name).into_iter().flatten().cloned())
        .filter(|n| is_plain(model, n))
        .collect()
}

/// Interfaces realized by the class or any of its superclasses, with their
/// parents, groups removed.
pub fn oracle_class_interfaces(
    model: &Model,
    parents: &BTreeMap<String, BTreeSet<String>>,
    class: &str,
) -> BTreeSet<String> {
    let mut owners: Vec<String> = vec![class.to_string()];
    owners.extend(parents.get(class).into_iter().flatten().cloned());
    let mut out = BTreeSet::new();
    for o in owners {
        if let Some(c) = model.classes.iter().find(|c| c.name == o) {
            for r in &c.realizes {
                out.insert(r.clone());
                out.extend(parents.get(r).into_iter().flatten().cloned());
            }
        }
    }
    out.retain(|n| is_plain(model, n));
    out
}

// ---------------------------------------------------------------- random DAGs

/// Up to 20 classifiers. Interfaces, some of them groups, generalize earlier
/// interfaces. Classes generalize earlier classes and realize interfaces.
/// A holder class has one port per interface.
pub fn random_dag(seed: u64) -> Model {
    let mut r = rng(seed);
    let total = r.gen_range(2..=19);
    let ni = r.gen_range(1..total);
    let nc = total - ni;
    let mut model = Model::new();
    for i in 0..ni {
        let generals: Vec<String> = (0..i)
            .filter(|_| r.gen_bool(0.3))
            .map(|j| format!("I{j}"))
            .collect();
        let group = generals.len() >= 2 && r.gen_bool(0.4);
        model.interfaces.push(iface(&format!("I{i}"), &generals, group));
    }
    for c in 0..nc {
        let mut cls = class(&format!("C{c}"));
        cls.generals = (0..c)
            .filter(|_| r.gen_bool(0.25))
            .map(|j| format!("C{j}"))
            .collect();
        cls.realizes = (0..ni)
            .filter(|_| r.gen_bool(0.2))
            .map(|j| format!("I{j}"))
            .collect();
        model.classes.push(cls);
    }
    let mut holder = class("Holder");
    holder.ports = (0..ni)
        .map(|i| port(&format!("p{i}"), &format!("I{i}"), r.gen_bool(0.5)))
        .collect();
    model.classes.push(holder);
    model
}

// ---------------------------------------------------------------- W007 ports

/// A composite `A` whose provided port `p` (a group of ten interfaces) has
/// 2..=5 untyped links to parts realizing random subsets of the universe.
/// Returns the model and the subset realized by each part, in link order.
pub fn random_fanout(seed: u64) -> (Model, Vec<BTreeSet<String>>) {
    let mut r = rng(seed);
    let mut model = Model::new();
    let universe: Vec<String> = (0..10).map(|i| format!("U{i}")).collect();
    for u in &universe {
        model.interfaces.push(iface(u, &[], false));
    }
    model.interfaces.push(iface("All", &universe, true));
    let links = r.gen_range(2..=5);
    let mut sets = Vec::new();
    let mut a = class("A");
    a.ports.push(port("p", "All", false));
    for k in 0..links {
        let size = r.gen_range(0..=4);
        let chosen: BTreeSet<String> = universe.choose_multiple(&mut r, size).cloned().collect();
        let mut x = class(&format!("X{k}"));
        x.realizes = chosen.iter().cloned().collect();
        model.classes.push(x);
        a.parts.push(part(&format!("x{k}"), &format!("X{k}")));
        a.connectors.push(connector(
            EndRef::own_port("p"),
            EndRef::part(&format!("x{k}")),
            None,
        ));
        sets.push(chosen);
    }
    model.classes.push(a);
    model.root = Some("A".into());
    (model, sets)
}

// ---------------------------------------------------------------- relay chains

/// `k` provided ports in a line: `C{k-1}.p -> x.p -> ... -> Leaf.p`, where
/// the leaf realizes the interface. With `k == 1` the root is the leaf.
pub fn relay_chain(k: usize) -> Model {
    assert!(k >= 1);
    let mut model = Model::new();
    model.interfaces.push(iface("I", &[], false));
    let mut leaf = class("Leaf");
    leaf.realizes = vec!["I".into()];
    leaf.ports.push(port("p", "I", false));
    model.classes.push(leaf);
    let mut inner = "Leaf".to_string();
    for level in 1..k {
        let name = format!("C{level}");
        let mut c = class(&name);
        c.ports.push(port("p", "I", false));
        c.parts.push(part("x", &inner));
        c.connectors.push(connector(
            EndRef::own_port("p"),
            EndRef::part_port("x", "p"),
            None,
        ));
        model.classes.push(c);
        inner = name;
    }
    model.root = Some(inner);
    model
}

// ---------------------------------------------------------------- well-formed models

#[derive(Clone)]
struct TypeInfo {
    name: String,
    provided: Vec<(String, String)>,
    required: Vec<(String, String)>,
    realized: BTreeSet<String>,
    /// Interfaces a portless component reaches over typed links.
    portless_uses: Vec<String>,
    portless: bool,
}

fn closure_of(interfaces: &[Interface], name: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut stack = vec![name.to_string()];
    while let Some(n) = stack.pop() {
        if out.insert(n.clone()) {
            if let Some(i) = interfaces.iter().find(|i| i.name == n) {
                stack.extend(i.generals.iter().cloned());
            }
        }
    }
    out
}

/// A random model that passes every rule by construction: leaves that
/// realize and use disjoint interface families, and up to three levels of
/// composites that expose, relay or assemble every port of their parts.
/// All classes share one concurrency kind.
pub fn well_formed(seed: u64) -> Model {
    let mut r = rng(seed);
    let kind = if r.gen_bool(0.5) {
        ClassKind::Active
    } else {
        ClassKind::Passive
    };
    let mut model = Model::new();
    let ni = r.gen_range(3..=7);
    for i in 0..ni {
        let generals: Vec<String> = (0..i)
            .filter(|_| r.gen_bool(0.25))
            .map(|j| format!("Q{j}"))
            .collect();
        model.interfaces.push(iface(&format!("Q{i}"), &generals, false));
    }
    let names: Vec<String> = model.interfaces.iter().map(|i| i.name.clone()).collect();
    let closure: BTreeMap<String, BTreeSet<String>> = names
        .iter()
        .map(|n| (n.clone(), closure_of(&model.interfaces, n)))
        .collect();

    let mut types: Vec<TypeInfo> = Vec::new();
    for l in 0..r.gen_range(2..=5) {
        let name = format!("Leaf{l}");
        let count = r.gen_range(1..=2);
        let realizes: Vec<String> = names.choose_multiple(&mut r, count).cloned().collect();
        let realized: BTreeSet<String> = realizes.iter().flat_map(|n| closure[n].clone()).collect();
        let candidates: Vec<String> = names
            .iter()
            .filter(|n| closure[*n].is_disjoint(&realized))
            .cloned()
            .collect();
        // Used interfaces with overlapping closures would give a request two
        // routes, and dropping one of them would strand nothing.
        let count = r.gen_range(0..=2);
        let mut uses: Vec<String> = Vec::new();
        let mut covered: BTreeSet<String> = BTreeSet::new();
        for c in candidates.choose_multiple(&mut r, candidates.len()) {
            if uses.len() < count && closure[c].is_disjoint(&covered) {
                covered.extend(closure[c].iter().cloned());
                uses.push(c.clone());
            }
        }
        let portless = r.gen_bool(0.3);
        let mut cls = class(&name);
        cls.kind = kind;
        cls.realizes = realizes;
        cls.uses = uses.clone();
        let mut info = TypeInfo {
            name: name.clone(),
            provided: Vec::new(),
            required: Vec::new(),
            realized: realized.clone(),
            portless_uses: Vec::new(),
            portless,
        };
        if portless {
            info.portless_uses = uses;
        } else {
            let offered: Vec<String> = realized.iter().cloned().collect();
            let count = r.gen_range(1..=2).min(offered.len());
            for (k, c) in offered.choose_multiple(&mut r, count).enumerate() {
                let name = format!("p{k}");
                cls.ports.push(port(&name, c, false));
                info.provided.push((name, c.clone()));
            }
            for (k, u) in uses.iter().enumerate() {
                let name = format!("r{k}");
                cls.ports.push(port(&name, u, true));
                info.required.push((name, u.clone()));
            }
        }
        model.classes.push(cls);
        types.push(info);
    }

    let composites = r.gen_range(1..=3);
    for level in 0..composites {
        let name = format!("Comp{level}");
        let mut cls = class(&name);
        cls.kind = kind;
        let mut info = TypeInfo {
            name: name.clone(),
            provided: Vec::new(),
            required: Vec::new(),
            realized: BTreeSet::new(),
            portless_uses: Vec::new(),
            portless: false,
        };
        let parts: Vec<TypeInfo> = (0..r.gen_range(1..=3))
            .map(|_| types.choose(&mut r).expect("types").clone())
            .collect();
        for (i, t) in parts.iter().enumerate() {
            let mut pt = part(&format!("x{i}"), &t.name);
            if r.gen_bool(0.15) {
                pt.multiplicity = 2;
            }
            cls.parts.push(pt);
        }
        let mut next_in = 0;
        let mut next_out = 0;
        let mut own = |class: &mut Class, info: &mut TypeInfo, contract: &str, reversed: bool| {
            let counter = if reversed { &mut next_out } else { &mut next_in };
            let name = format!("{}{}", if reversed { "out" } else { "in" }, *counter);
            *counter += 1;
            class.ports.push(port(&name, contract, reversed));
            if reversed {
                info.required.push((name.clone(), contract.to_string()));
            } else {
                info.provided.push((name.clone(), contract.to_string()));
            }
            name
        };
        for (i, t) in parts.iter().enumerate() {
            let xi = format!("x{i}");
            for (q, c) in &t.provided {
                if r.gen_bool(0.7) {
                    let p = own(&mut cls, &mut info, c, false);
                    cls
                        .connectors
                        .push(connector(EndRef::own_port(&p), EndRef::part_port(&xi, q), None));
                }
            }
            if t.portless && r.gen_bool(0.7) {
                let offered: Vec<&String> = t.realized.iter().collect();
                let c = (*offered.choose(&mut r).expect("leaf realizes")).clone();
                let p = own(&mut cls, &mut info, &c, false);
                cls
                    .connectors
                    .push(connector(EndRef::own_port(&p), EndRef::part(&xi), None));
            }
            let sibling_with = |contract: &str, r: &mut ChaCha8Rng| {
                let options: Vec<(usize, String)> = parts
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .flat_map(|(j, s)| {
                        s.provided
                            .iter()
                            .filter(|(_, c)| c == contract)
                            .map(move |(q, _)| (j, q.clone()))
                    })
                    .collect();
                options.choose(r).cloned()
            };
            for (rp, c) in &t.required {
                match sibling_with(c, &mut r).filter(|_| r.gen_bool(0.5)) {
                    Some((j, q)) => cls.connectors.push(connector(
                        EndRef::part_port(&xi, rp),
                        EndRef::part_port(&format!("x{j}"), &q),
                        None,
                    )),
                    None => {
                        let p = own(&mut cls, &mut info, c, true);
                        cls
                            .connectors
                            .push(connector(EndRef::part_port(&xi, rp), EndRef::own_port(&p), None));
                    }
                }
            }
            for u in &t.portless_uses {
                let a = format!("{name}_{xi}_{u}");
                model.associations.push(assoc(&a, &t.name, u));
                match sibling_with(u, &mut r).filter(|_| r.gen_bool(0.5)) {
                    Some((j, q)) => cls.connectors.push(connector(
                        EndRef::part(&xi),
                        EndRef::part_port(&format!("x{j}"), &q),
                        Some(&a),
                    )),
                    None => {
                        let p = own(&mut cls, &mut info, u, true);
                        cls
                            .connectors
                            .push(connector(EndRef::part(&xi), EndRef::own_port(&p), Some(&a)));
                    }
                }
            }
        }
        model.classes.push(cls);
        types.push(info);
        model.root = Some(name);
    }
    model
}

/// Names of classes instantiated below `root`, root included.
pub fn reachable_classes(model: &Model, root: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut stack = vec![root.to_string()];
    while let Some(n) = stack.pop() {
        if out.insert(n.clone()) {
            if let Some(c) = model.class(&n) {
                stack.extend(c.parts.iter().map(|p| p.ty.clone()));
            }
        }
    }
    out
}

// ---------------------------------------------------------------- DSL printer

fn list(items: &[String]) -> String {
    items.join(", ")
}

/// Renders a model as DSL source. Used to compare the two input syntaxes.
pub fn to_dsl(model: &Model) -> String {
    let mut out = String::new();
    for i in &model.interfaces {
        out.push_str(&format!("interface {}", i.name));
        if i.is_group {
            out.push_str(" group");
        }
        if !i.generals.is_empty() {
            out.push_str(&format!(" : {}", list(&i.generals)));
        }
        out.push_str(" {");
        for op in &i.operations {
            out.push_str(&format!(" op {op};"));
        }
        out.push_str(" }\n");
    }
    for c in &model.classes {
        out.push_str(&format!("class {} {}", c.name, c.kind.as_str()));
        if !c.generals.is_empty() {
            out.push_str(&format!(" : {}", list(&c.generals)));
        }
        out.push_str(" {\n");
        if !c.realizes.is_empty() {
            out.push_str(&format!("    realizes {};\n", list(&c.realizes)));
        }
        if !c.uses.is_empty() {
            out.push_str(&format!("    uses {};\n", list(&c.uses)));
        }
        for a in &c.attributes {
            out.push_str(&format!("    attr {}: {};\n", a.name, a.ty));
        }
        for p in &c.parts {
            out.push_str(&format!("    part {}: {}[{}];\n", p.name, p.ty, p.multiplicity));
        }
        for p in &c.ports {
            let rev = if p.reversed { " reversed" } else { "" };
            out.push_str(&format!("    port {}: {}{rev};\n", p.name, p.contract));
        }
        for k in &c.connectors {
            out.push_str(&format!("    connector {}, {}", k.end1, k.end2));
            if let Some(a) = &k.association {
                out.push_str(&format!(" via {a}"));
            }
            out.push_str(";\n");
        }
        out.push_str("}\n");
    }
    for a in &model.associations {
        let end = |e: &AssociationEnd| {
            if e.navigable {
                format!("{} nav", e.ty)
            } else {
                e.ty.clone()
            }
        };
        out.push_str(&format!("assoc {} ({}, {});\n", a.name, end(&a.end1), end(&a.end2)));
    }
    if let Some(r) = &model.root {
        out.push_str(&format!("root {r};\n"));
    }
    out
}
