//! Referential integrity checks and synthesis of the default `deleg_I`
//! associations. Element paths are resolved here too.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::diagnostic::{sort_diagnostics, Code, Diagnostic};
use crate::model::{
    Association, Class, ClassifierRef, ConnectorId, EndRef, Element, Model, DELEG_PREFIX,
};

/// Checks every structural invariant of `model`. Returns an empty list iff
/// the model is referentially sound.
pub fn validate_integrity(model: &Model) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    check_names(model, &mut out);
    check_interfaces(model, &mut out);
    check_associations(model, &mut out);
    for class in &model.classes {
        check_class(model, class, &mut out);
    }
    if let Some(root) = &model.root {
        if model.class(root).is_none() {
            out.push(Diagnostic::new(
                Code::E001,
                root.clone(),
                format!("root class `{root}` is not declared"),
            ));
        }
    }
    out.extend(generalization_cycles(model));
    out.extend(containment_cycles(model));
    sort_diagnostics(&mut out);
    out.dedup();
    out
}

fn check_names(model: &Model, out: &mut Vec<Diagnostic>) {
    let mut seen: HashSet<&str> = HashSet::new();
    let names = model
        .interfaces
        .iter()
        .map(|i| i.name.as_str())
        .chain(model.classes.iter().map(|c| c.name.as_str()));
    for name in names {
        if !seen.insert(name) {
            out.push(Diagnostic::new(
                Code::E002,
                name,
                format!("classifier `{name}` is declared more than once"),
            ));
        }
    }
    let mut assocs: HashSet<&str> = HashSet::new();
    for a in &model.associations {
        if !assocs.insert(&a.name) {
            out.push(Diagnostic::new(
                Code::E002,
                a.name.clone(),
                format!("association `{}` is declared more than once", a.name),
            ));
        }
    }
    for class in &model.classes {
        let mut local: HashSet<&str> = HashSet::new();
        let members = class
            .parts
            .iter()
            .map(|p| p.name.as_str())
            .chain(class.ports.iter().map(|p| p.name.as_str()))
            .chain(class.attributes.iter().map(|a| a.name.as_str()));
        for name in members {
            if !local.insert(name) {
                out.push(Diagnostic::new(
                    Code::E002,
                    format!("{}.{}", class.name, name),
                    format!("`{name}` is declared more than once in class `{}`", class.name),
                ));
            }
        }
    }
}

fn dangling(subject: String, what: &str, name: &str) -> Diagnostic {
    Diagnostic::new(
        Code::E001,
        subject,
        format!("{what} `{name}` is not declared"),
    )
}

fn wrong_kind(subject: String, what: &str, name: &str, expected: &str) -> Diagnostic {
    Diagnostic::new(
        Code::E008,
        subject,
        format!("{what} `{name}` must be {expected}"),
    )
}

/// Pushes E001/E008 when `name` is missing or not an interface.
fn expect_interface(model: &Model, subject: &str, what: &str, name: &str, out: &mut Vec<Diagnostic>) {
    match model.classifier(name) {
        None => out.push(dangling(subject.to_string(), what, name)),
        Some(ClassifierRef::Class(_)) => {
            out.push(wrong_kind(subject.to_string(), what, name, "an interface"))
        }
        Some(ClassifierRef::Interface(_)) => {}
    }
}

fn check_interfaces(model: &Model, out: &mut Vec<Diagnostic>) {
    for iface in &model.interfaces {
        for g in &iface.generals {
            expect_interface(model, &iface.name, "general", g, out);
        }
        if iface.is_group && iface.generals.len() < 2 {
            out.push(Diagnostic::new(
                Code::E007,
                iface.name.clone(),
                format!(
                    "interface group `{}` bundles {} interface(s); a group needs at least two generals",
                    iface.name,
                    iface.generals.len()
                ),
            ));
        }
    }
}

fn check_associations(model: &Model, out: &mut Vec<Diagnostic>) {
    for a in &model.associations {
        for end in [&a.end1, &a.end2] {
            if model.classifier(&end.ty).is_none() {
                out.push(dangling(a.name.clone(), "association end type", &end.ty));
            }
        }
    }
}

fn check_class(model: &Model, class: &Class, out: &mut Vec<Diagnostic>) {
    let cname = class.name.as_str();
    for g in &class.generals {
        match model.classifier(g) {
            None => out.push(dangling(cname.to_string(), "general", g)),
            Some(ClassifierRef::Interface(_)) => {
                out.push(wrong_kind(cname.to_string(), "general", g, "a class"))
            }
            Some(ClassifierRef::Class(_)) => {}
        }
    }
    for i in &class.realizes {
        expect_interface(model, cname, "realized interface", i, out);
    }
    for i in &class.uses {
        expect_interface(model, cname, "used interface", i, out);
    }
    for attr in &class.attributes {
        if model.classifier(&attr.ty).is_none() {
            out.push(dangling(
                format!("{cname}.{}", attr.name),
                "attribute type",
                &attr.ty,
            ));
        }
    }
    for part in &class.parts {
        let subject = format!("{cname}.{}", part.name);
        match model.classifier(&part.ty) {
            None => out.push(dangling(subject.clone(), "part type", &part.ty)),
            Some(ClassifierRef::Interface(_)) => {
                out.push(wrong_kind(subject.clone(), "part type", &part.ty, "a class"))
            }
            Some(ClassifierRef::Class(_)) => {}
        }
        if part.multiplicity < 1 {
            out.push(Diagnostic::new(
                Code::E009,
                subject,
                format!("part multiplicity is {}; it must be at least 1", part.multiplicity),
            ));
        }
    }
    for port in &class.ports {
        expect_interface(
            model,
            &format!("{cname}.{}", port.name),
            "port contract",
            &port.contract,
            out,
        );
    }
    for (index, conn) in class.connectors.iter().enumerate() {
        let subject = format!("{cname}#{index}");
        if let Some(a) = &conn.association {
            if model.association(a).is_none() {
                out.push(dangling(subject.clone(), "association", a));
            }
        }
        check_end(model, class, &subject, &conn.end1, out);
        check_end(model, class, &subject, &conn.end2, out);
        if conn.end1 == conn.end2 {
            out.push(Diagnostic::new(
                Code::E006,
                subject,
                format!("connector links `{}` to itself", conn.end1),
            ));
        }
    }
}

fn check_end(model: &Model, owner: &Class, subject: &str, end: &EndRef, out: &mut Vec<Diagnostic>) {
    match (&end.part, &end.port) {
        (None, None) => out.push(Diagnostic::new(
            Code::E006,
            subject,
            "connector end names neither a part nor a port",
        )),
        (None, Some(port)) => {
            if owner.port(port).is_none() {
                out.push(Diagnostic::new(
                    Code::E006,
                    subject,
                    format!("`self.{port}`: class `{}` has no port `{port}`", owner.name),
                ));
            }
        }
        (Some(part), port) => {
            let Some(p) = owner.part(part) else {
                out.push(dangling(subject.to_string(), "part", part));
                return;
            };
            if let Some(port) = port {
                // Missing part type is reported on the part itself.
                if let Some(ty) = model.class(&p.ty) {
                    if ty.port(port).is_none() {
                        out.push(Diagnostic::new(
                            Code::E006,
                            subject,
                            format!(
                                "`{part}.{port}`: class `{}` has no port `{port}`",
                                ty.name
                            ),
                        ));
                    }
                }
            }
        }
    }
}

/// Generalization cycles found by depth-first search over the generals graph.
fn generalization_cycles(model: &Model) -> Vec<Diagnostic> {
    let mut graph: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for i in &model.interfaces {
        graph.insert(&i.name, i.generals.iter().map(String::as_str).collect());
    }
    for c in &model.classes {
        graph.insert(&c.name, c.generals.iter().map(String::as_str).collect());
    }
    find_cycles(&graph)
        .into_iter()
        .map(|cycle| {
            Diagnostic::new(
                Code::E003,
                cycle[0].to_string(),
                format!("generalization cycle: {}", cycle.join(" -> ")),
            )
        })
        .collect()
}

fn containment_cycles(model: &Model) -> Vec<Diagnostic> {
    let mut graph: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for c in &model.classes {
        graph.insert(&c.name, c.parts.iter().map(|p| p.ty.as_str()).collect());
    }
    find_cycles(&graph)
        .into_iter()
        .map(|cycle| {
            Diagnostic::new(
                Code::E010,
                cycle[0].to_string(),
                format!("class contains itself through its parts: {}", cycle.join(" -> ")),
            )
        })
        .collect()
}

/// Returns one representative cycle per strongly connected loop reached by
/// the DFS, each rotated to start at its smallest name.
fn find_cycles<'a>(graph: &BTreeMap<&'a str, Vec<&'a str>>) -> Vec<Vec<&'a str>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    fn visit<'a>(
        node: &'a str,
        graph: &BTreeMap<&'a str, Vec<&'a str>>,
        marks: &mut HashMap<&'a str, Mark>,
        stack: &mut Vec<&'a str>,
        cycles: &mut Vec<Vec<&'a str>>,
    ) {
        marks.insert(node, Mark::Open);
        stack.push(node);
        for &next in graph.get(node).map(Vec::as_slice).unwrap_or(&[]) {
            match marks.get(next) {
                Some(Mark::Open) => {
                    let start = stack.iter().position(|n| *n == next).unwrap_or(0);
                    let mut cycle: Vec<&str> = stack[start..].to_vec();
                    let min = cycle
                        .iter()
                        .enumerate()
                        .min_by_key(|(_, n)| **n)
                        .map(|(i, _)| i)
                        .unwrap_or(0);
                    cycle.rotate_left(min);
                    cycle.push(cycle[0]);
                    cycles.push(cycle);
                }
                Some(Mark::Done) => {}
                None if graph.contains_key(next) => visit(next, graph, marks, stack, cycles),
                None => {}
            }
        }
        stack.pop();
        marks.insert(node, Mark::Done);
    }

    let mut marks = HashMap::new();
    let mut cycles = Vec::new();
    for &node in graph.keys() {
        if !marks.contains_key(node) {
            let mut stack = Vec::new();
            visit(node, graph, &mut marks, &mut stack, &mut cycles);
        }
    }
    cycles.sort();
    cycles.dedup();
    cycles
}

/// Adds the default `deleg_I` association for every non-group interface that
/// lacks one. Idempotent.
pub fn synthesize_deleg_associations(model: &Model) -> Result<Model, Vec<Diagnostic>> {
    let mut errors = Vec::new();
    for a in &model.associations {
        let Some(target) = a.name.strip_prefix(DELEG_PREFIX) else {
            continue;
        };
        let Some(iface) = model.interface(target) else {
            continue;
        };
        let well_shaped = a.end1.ty == iface.name
            && a.end2.ty == iface.name
            && a.end2.navigable
            && !a.end1.navigable;
        if iface.is_group || !well_shaped {
            errors.push(Diagnostic::new(
                Code::E004,
                a.name.clone(),
                format!(
                    "`{}` must be a directed association from `{t}` to `{t}` (navigable at end2) on a non-group interface",
                    a.name,
                    t = iface.name
                ),
            ));
        }
    }
    if !errors.is_empty() {
        sort_diagnostics(&mut errors);
        return Err(errors);
    }

    let mut out = model.clone();
    for iface in model.plain_interfaces() {
        let name = format!("{DELEG_PREFIX}{}", iface.name);
        if out.association(&name).is_none() {
            out.associations.push(Association::deleg(&iface.name));
        }
    }
    Ok(out)
}

/// Resolves a dotted element path: `Name`, `Class.member`, `Class.part.port`
/// or `Class#index`.
pub fn resolve<'m>(model: &'m Model, path: &str) -> Result<Element<'m>, Diagnostic> {
    let unknown = || {
        Diagnostic::new(
            Code::E005,
            path.to_string(),
            format!("unknown element path `{path}`"),
        )
    };
    if let Some((class, index)) = path.split_once('#') {
        let class_index = model.class_index(class).ok_or_else(unknown)?;
        let index: usize = index.parse().map_err(|_| unknown())?;
        let connector = model.classes[class_index]
            .connectors
            .get(index)
            .ok_or_else(unknown)?;
        return Ok(Element::Connector {
            id: ConnectorId {
                class: class_index,
                index,
            },
            connector,
        });
    }
    if let Some((class, member)) = path.split_once('.') {
        let owner = model.class(class).ok_or_else(unknown)?;
        if let Some((part, port)) = member.split_once('.') {
            // `Class.part.port`: a port seen through a part.
            let part = owner.part(part).ok_or_else(unknown)?;
            let ty = model.class(&part.ty).ok_or_else(unknown)?;
            let port = ty.port(port).ok_or_else(unknown)?;
            return Ok(Element::Port { owner: ty, port });
        }
        if let Some(part) = owner.part(member) {
            return Ok(Element::Part { owner, part });
        }
        if let Some(port) = owner.port(member) {
            return Ok(Element::Port { owner, port });
        }
        return Err(unknown());
    }
    if let Some(c) = model.class(path) {
        return Ok(Element::Class(c));
    }
    if let Some(i) = model.interface(path) {
        return Ok(Element::Interface(i));
    }
    if let Some(a) = model.association(path) {
        return Ok(Element::Association(a));
    }
    Err(unknown())
}
