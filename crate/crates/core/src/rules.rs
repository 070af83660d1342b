//! The twelve well-formedness checks.
//!
//! | code | check |
//! |------|-------|
//! | W000 | ports are unidirectional |
//! | W001 | delegation links join ports of the same direction |
//! | W002 | assembly links join a required port to a provided one |
//! | W003 | association typing a link agrees with the link's direction |
//! | W004 | a typed link leaving a port points at a transported interface |
//! | W005 | a link leaving a part is typed, with compatible ends |
//! | W006 | every computable transported set is non-empty (untyped links leaving a part fall under W005) |
//! | W007 | untyped links leaving one port transport disjoint sets |
//! | W008 | links leaving a port transport exactly the port's interfaces |
//! | W009 | passive composites contain passive parts only |
//! | W010 | active composites contain only passive, or only active/protected parts |
//! | W011 | observer composites contain observer parts only |
//!
//! Every check assumes integrity holds and default `deleg_I` associations
//! have been synthesized; connectors whose ends do not resolve are skipped.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::diagnostic::{fmt_set, sort_diagnostics, Code, Diagnostic, Severity};
use crate::model::{ClassKind, Model};
use crate::types::{InterfaceSet, LinkEnd, LinkInfo, LinkKind, TypeSystem};

#[derive(Debug, Clone, Default)]
pub struct CheckOptions {
    /// Codes reported as warnings instead of errors.
    pub downgrade: BTreeSet<Code>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub passed: bool,
    pub diagnostics: Vec<Diagnostic>,
    pub notes: Vec<Diagnostic>,
    pub stats: BTreeMap<String, usize>,
}

impl CheckReport {
    pub fn codes(&self) -> BTreeSet<Code> {
        self.diagnostics.iter().map(|d| d.code).collect()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics
            .iter()
            .filter(|d| d.severity == Severity::Error)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for d in &self.diagnostics {
            out.push_str(&d.to_string());
            out.push('\n');
        }
        for n in &self.notes {
            out.push_str(&n.to_string());
            out.push('\n');
        }
        let errors = self.errors().count();
        let warnings = self.diagnostics.len() - errors;
        out.push_str(&format!(
            "{}: {} error(s), {} warning(s), {} note(s)\n",
            if self.passed { "passed" } else { "failed" },
            errors,
            warnings,
            self.notes.len()
        ));
        out
    }
}

pub fn check_model(model: &Model) -> CheckReport {
    check_model_with(model, &CheckOptions::default())
}

pub fn check_model_with(model: &Model, options: &CheckOptions) -> CheckReport {
    let ts = TypeSystem::new(model);
    let links = ts.links();
    let mut all = Vec::new();
    all.extend(rule_unidirectional(&ts));
    all.extend(rule_link_type(&links));
    all.extend(rule_association_direction(&ts, &links));
    all.extend(rule_typed_from_port(&links));
    all.extend(rule_typed_from_part(&ts, &links));
    all.extend(rule_nonvoid(&ts, &links));
    all.extend(rule_pairwise_disjoint(&links));
    all.extend(rule_completeness(&ts, &links));
    all.extend(rule_concurrency(model));
    all.extend(rule_observer(model));
    all.extend(unconnected_port_notes(&ts, &links));

    let (mut notes, mut diagnostics): (Vec<_>, Vec<_>) =
        all.into_iter().partition(|d| d.code.is_note());
    for d in &mut diagnostics {
        if options.downgrade.contains(&d.code) {
            d.severity = Severity::Warning;
        }
    }
    sort_diagnostics(&mut diagnostics);
    sort_diagnostics(&mut notes);
    let mut stats = BTreeMap::new();
    for d in &diagnostics {
        *stats.entry(d.code.to_string()).or_insert(0) += 1;
    }
    let passed = diagnostics.iter().all(|d| d.severity != Severity::Error);
    CheckReport {
        passed,
        diagnostics,
        notes,
        stats,
    }
}

/// Element path of a link end seen from the connector's owner:
/// `Owner.port` for the owner's own port, `Owner.part.port` or `Owner.part`.
pub fn end_path(link: &LinkInfo<'_>, end: LinkEnd<'_>) -> String {
    let owner = &link.owner.name;
    match end {
        LinkEnd::Part(p) => format!("{owner}.{}", p.name),
        LinkEnd::PartPort(part, port) => format!("{owner}.{}.{}", part.name, port.name),
        LinkEnd::OwnPort(port) => format!("{owner}.{}", port.name),
    }
}

fn link_path(link: &LinkInfo<'_>) -> String {
    format!("{}#{}", link.owner.name, link.id.index)
}

fn names<'a>(set: &'a InterfaceSet<'_>) -> impl Iterator<Item = &'a str> {
    set.iter().copied()
}

/// W000.
pub fn rule_unidirectional(ts: &TypeSystem<'_>) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for class in &ts.model().classes {
        let used = ts.used_interfaces(class);
        let provided = ts.class_interfaces(&class.name);
        let covered: InterfaceSet<'_> = class
            .ports
            .iter()
            .filter(|p| p.reversed)
            .flat_map(|p| ts.port_interfaces(p))
            .collect();
        let uncovered: InterfaceSet<'_> = used.difference(&covered).copied().collect();
        for port in &class.ports {
            let carried = ts.port_interfaces(port);
            let subject = format!("{}.{}", class.name, port.name);
            let message = if !port.reversed {
                let both: InterfaceSet<'_> = carried.intersection(&used).copied().collect();
                if !both.is_empty() {
                    Some(format!(
                        "port `{}` provides {} that `{}` also requires; split it into a provided port and a reversed port",
                        port.name,
                        fmt_set(names(&both)),
                        class.name
                    ))
                } else if !uncovered.is_empty() {
                    Some(format!(
                        "`{}` requires {} but has no reversed port for it, so port `{}` would carry requests both ways; split it into `{}_in: {}` and a reversed `{}_out`",
                        class.name,
                        fmt_set(names(&uncovered)),
                        port.name,
                        port.name,
                        port.contract,
                        port.name
                    ))
                } else {
                    None
                }
            } else {
                let realized: InterfaceSet<'_> =
                    carried.intersection(provided).copied().collect();
                let required: InterfaceSet<'_> = carried.intersection(&used).copied().collect();
                (!realized.is_empty() && !required.is_empty()).then(|| {
                    format!(
                        "reversed port `{}` carries {} provided by `{}` alongside required {}; split the contract",
                        port.name,
                        fmt_set(names(&realized)),
                        class.name,
                        fmt_set(names(&required))
                    )
                })
            };
            if let Some(message) = message {
                out.push(Diagnostic::new(Code::W000, subject, message));
            }
        }
    }
    out
}

/// W001 and W002.
pub fn rule_link_type(links: &[LinkInfo<'_>]) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for link in links.iter().filter(|l| l.kind == LinkKind::Forbidden) {
        let p1 = link.end1.port();
        let p2 = link.end2.port();
        let describe = |e: LinkEnd<'_>| {
            let dir = e.port().map(|p| p.direction().to_string()).unwrap_or_default();
            format!("{dir} port `{e}`")
        };
        let (code, message) = if link.end1.is_own_port() && link.end2.is_own_port() {
            (
                Code::W001,
                "link between two ports of the composite itself has no direction".to_string(),
            )
        } else if link.end1.is_own_port() || link.end2.is_own_port() {
            (
                Code::W001,
                format!(
                    "delegation between {} and {}: both ports must have the same direction",
                    describe(link.end1),
                    describe(link.end2)
                ),
            )
        } else {
            let both_required = p1.is_some_and(|p| p.reversed) && p2.is_some_and(|p| p.reversed);
            let which = if both_required { "required" } else { "provided" };
            (
                Code::W002,
                format!(
                    "assembly between two {which} ports `{}` and `{}`; one end must be a reversed (required) port and the other a provided port",
                    link.end1, link.end2
                ),
            )
        };
        out.push(
            Diagnostic::new(code, link_path(link), message)
                .with_related([end_path(link, link.end1), end_path(link, link.end2)]),
        );
    }
    out
}

/// W003: navigability and association kinds allowed for the link's shape,
/// plus end compatibility for links leaving a port.
pub fn rule_association_direction(ts: &TypeSystem<'_>, links: &[LinkInfo<'_>]) -> Vec<Diagnostic> {
    let model = ts.model();
    let mut out = Vec::new();
    let is_iface = |n: &str| model.interface(n).is_some();
    for link in links.iter().filter(|l| !l.kind.is_forbidden()) {
        let Some(assoc) = link.association else {
            continue;
        };
        let mut push = |msg: String| {
            out.push(
                Diagnostic::new(Code::W003, link_path(link), msg)
                    .with_related([assoc.name.clone()]),
            );
        };
        if assoc.is_not_navigable() {
            push(format!(
                "association `{}` is not navigable at either end; the link is not well-formed",
                assoc.name
            ));
            continue;
        }
        if assoc.is_bidirectional() {
            if link.kind != LinkKind::AssemblyPartPart {
                push(format!(
                    "bidirectional association `{}` may only type a link between two parts",
                    assoc.name
                ));
            }
            continue;
        }
        let (start, end) = assoc.oriented();
        let (Some(link_start), Some(link_far)) = (link.start(), link.far()) else {
            continue;
        };
        if link.origin.is_from_port() {
            if !(is_iface(&start.ty) && is_iface(&end.ty)) {
                let hint = if link_far.port().is_none() {
                    " (for a link from a port to a part only an interface-interface association is accepted)"
                } else {
                    ""
                };
                push(format!(
                    "link leaving port `{link_start}` can only be typed by an association between two interfaces, but `{}` joins `{}` and `{}`{hint}",
                    assoc.name, start.ty, end.ty
                ));
                continue;
            }
            let start_port = link_start.port().expect("port origin");
            if !ts.port_compatible(start_port, &start.ty) {
                push(format!(
                    "association `{}` starts at `{}`, which port `{link_start}` does not carry",
                    assoc.name, start.ty
                ));
            }
            let far_ok = match link_far {
                LinkEnd::Part(part) => ts.classifier_compatible(&part.ty, &end.ty),
                LinkEnd::PartPort(_, p) | LinkEnd::OwnPort(p) => ts.port_compatible(p, &end.ty),
            };
            if !far_ok {
                push(format!(
                    "association `{}` points at `{}`, which is not compatible with link end `{link_far}`",
                    assoc.name, end.ty
                ));
            }
        } else if link_far.port().is_some() {
            // part -> port: class->interface or interface->interface only.
            if !is_iface(&end.ty) {
                push(format!(
                    "link from part `{link_start}` to port `{link_far}` accepts only associations pointing at an interface; `{}` points at class `{}`",
                    assoc.name, end.ty
                ));
            }
        }
    }
    out
}

/// W004.
pub fn rule_typed_from_port(links: &[LinkInfo<'_>]) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for link in links.iter().filter(|l| l.origin.is_from_port()) {
        let Some(assoc) = link.association else {
            continue;
        };
        if assoc.is_bidirectional() || assoc.is_not_navigable() {
            // not directed: reported by W003
            continue;
        }
        let pointed = assoc.pointed_type();
        if !link.transported.interfaces.contains(pointed) {
            out.push(
                Diagnostic::new(
                    Code::W004,
                    link_path(link),
                    format!(
                        "association `{}` points at `{pointed}`, which is not in the transported set {}",
                        assoc.name,
                        fmt_set(names(&link.transported.interfaces))
                    ),
                )
                .with_related([assoc.name.clone()]),
            );
        }
    }
    out
}

/// W005.
pub fn rule_typed_from_part(ts: &TypeSystem<'_>, links: &[LinkInfo<'_>]) -> Vec<Diagnostic> {
    let model = ts.model();
    let mut out = Vec::new();
    for link in links.iter().filter(|l| l.origin.is_from_part()) {
        let (Some(start), Some(far)) = (link.start(), link.far()) else {
            continue;
        };
        let start_part = start.part().expect("part origin");
        let Some(assoc) = link.association else {
            out.push(
                Diagnostic::new(
                    Code::W005,
                    link_path(link),
                    format!(
                        "link starts from part `{start}` and must be typed with an association so the component can address it"
                    ),
                )
                .with_related([end_path(link, start), end_path(link, far)]),
            );
            continue;
        };
        if assoc.is_not_navigable() {
            continue;
        }
        let compat = |end: LinkEnd<'_>, ty: &str| match end {
            LinkEnd::Part(p) => ts.classifier_compatible(&p.ty, ty),
            LinkEnd::PartPort(_, p) | LinkEnd::OwnPort(p) => ts.port_compatible(p, ty),
        };
        let ok = match far {
            LinkEnd::Part(_) => {
                let (a_start, a_end) = assoc.oriented();
                let forward = compat(start, &a_start.ty) && compat(far, &a_end.ty);
                if assoc.is_bidirectional() {
                    forward || (compat(start, &a_end.ty) && compat(far, &a_start.ty))
                } else {
                    forward
                }
            }
            _ => {
                let (a_start, a_end) = assoc.oriented();
                let end_is_iface = model.interface(&a_end.ty).is_some();
                if assoc.is_bidirectional() || !end_is_iface {
                    // shape violation, reported by W003
                    continue;
                }
                ts.classifier_compatible(&start_part.ty, &a_start.ty) && compat(far, &a_end.ty)
            }
        };
        if !ok {
            let (a_start, a_end) = assoc.oriented();
            out.push(
                Diagnostic::new(
                    Code::W005,
                    link_path(link),
                    format!(
                        "ends `{start}` -> `{far}` are not compatible with association `{}` ({} -> {})",
                        assoc.name, a_start.ty, a_end.ty
                    ),
                )
                .with_related([assoc.name.clone()]),
            );
        }
    }
    out
}

/// W006.
pub fn rule_nonvoid(ts: &TypeSystem<'_>, links: &[LinkInfo<'_>]) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for link in links {
        if !link.transported.computable || !link.transported.interfaces.is_empty() {
            continue;
        }
        if link.origin.is_from_part() && !link.is_typed() {
            // reported by W005
            continue;
        }
        let side = |e: LinkEnd<'_>| match e {
            LinkEnd::Part(p) => fmt_set(names(ts.class_interfaces(&p.ty))),
            LinkEnd::PartPort(_, p) | LinkEnd::OwnPort(p) => fmt_set(names(&ts.port_interfaces(p))),
        };
        let detail = match link.association {
            Some(a) => format!(
                "the ends and association `{}` (pointing at `{}`) share no interface",
                a.name,
                a.pointed_type()
            ),
            None => format!(
                "{} and {} share no interface",
                side(link.end1),
                side(link.end2)
            ),
        };
        out.push(Diagnostic::new(
            Code::W006,
            link_path(link),
            format!("link `{}` -> `{}` transports nothing: {detail}", link.end1, link.end2),
        ));
    }
    out
}

/// Links grouped by the port they leave, keyed by that port's path.
fn links_by_origin_port<'a, 'm>(
    links: &'a [LinkInfo<'m>],
) -> BTreeMap<String, Vec<&'a LinkInfo<'m>>> {
    let mut out: BTreeMap<String, Vec<&LinkInfo<'m>>> = BTreeMap::new();
    for link in links {
        if link.origin_port().is_some() {
            let start = link.start().expect("origin");
            out.entry(end_path(link, start)).or_default().push(link);
        }
    }
    out
}

/// W007, using the cardinality identity: sets are pairwise disjoint iff the
/// size of their union equals the sum of their sizes.
pub fn rule_pairwise_disjoint(links: &[LinkInfo<'_>]) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (port, group) in links_by_origin_port(links) {
        let untyped: Vec<&LinkInfo<'_>> = group
            .into_iter()
            .filter(|l| !l.is_typed() && l.transported.computable)
            .collect();
        if untyped.len() < 2 {
            continue;
        }
        let sets: Vec<&InterfaceSet<'_>> = untyped.iter().map(|l| &l.transported.interfaces).collect();
        if pairwise_disjoint_by_cardinality(&sets) {
            continue;
        }
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for s in &sets {
            for i in s.iter() {
                *counts.entry(i).or_insert(0) += 1;
            }
        }
        let shared: Vec<&str> = counts
            .into_iter()
            .filter(|(_, n)| *n > 1)
            .map(|(i, _)| i)
            .collect();
        out.push(
            Diagnostic::new(
                Code::W007,
                port,
                format!(
                    "untyped links leaving this port overlap on {}; type all but one of them with an explicit association",
                    fmt_set(shared)
                ),
            )
            .with_related(untyped.iter().map(|l| link_path(l))),
        );
    }
    out
}

pub fn pairwise_disjoint_by_cardinality(sets: &[&InterfaceSet<'_>]) -> bool {
    let union: BTreeSet<&str> = sets.iter().flat_map(|s| s.iter().copied()).collect();
    let total: usize = sets.iter().map(|s| s.len()).sum();
    union.len() == total
}

/// W008.
pub fn rule_completeness(ts: &TypeSystem<'_>, links: &[LinkInfo<'_>]) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (port_path, group) in links_by_origin_port(links) {
        let port = group[0].origin_port().expect("grouped by origin port");
        let expected = ts.port_interfaces(port);
        let union: InterfaceSet<'_> = group
            .iter()
            .flat_map(|l| l.transported.interfaces.iter().copied())
            .collect();
        if union == expected {
            continue;
        }
        let missing: Vec<&str> = expected.difference(&union).copied().collect();
        let excess: Vec<&str> = union.difference(&expected).copied().collect();
        let mut msg = format!(
            "links leaving this port transport {} but the port carries {}",
            fmt_set(names(&union)),
            fmt_set(names(&expected))
        );
        if !missing.is_empty() {
            msg.push_str(&format!("; missing {}", fmt_set(missing)));
        }
        if !excess.is_empty() {
            msg.push_str(&format!("; excess {}", fmt_set(excess)));
        }
        out.push(
            Diagnostic::new(Code::W008, port_path, msg)
                .with_related(group.iter().map(|l| link_path(l))),
        );
    }
    out
}

/// W009 and W010.
pub fn rule_concurrency(model: &Model) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for class in model.classes.iter().filter(|c| c.is_composite()) {
        let kinds: Vec<(&str, ClassKind)> = class
            .parts
            .iter()
            .filter_map(|p| model.class(&p.ty).map(|t| (p.name.as_str(), t.kind)))
            .collect();
        let all = |pred: &dyn Fn(ClassKind) -> bool| kinds.iter().all(|(_, k)| pred(*k));
        let listing = || {
            kinds
                .iter()
                .map(|(n, k)| format!("{n}: {k}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        match class.kind {
            ClassKind::Passive => {
                if !all(&|k| k == ClassKind::Passive) {
                    out.push(Diagnostic::new(
                        Code::W009,
                        class.name.clone(),
                        format!(
                            "passive composite `{}` may contain only passive parts ({})",
                            class.name,
                            listing()
                        ),
                    ));
                }
            }
            ClassKind::Active => {
                let passive = all(&|k| k == ClassKind::Passive);
                let shared = all(&|k| matches!(k, ClassKind::Active | ClassKind::Protected));
                if !passive && !shared {
                    out.push(Diagnostic::new(
                        Code::W010,
                        class.name.clone(),
                        format!(
                            "active composite `{}` must contain only passive parts, or only active and protected parts ({}); mark shared passive parts <<protected>>",
                            class.name,
                            listing()
                        ),
                    ));
                }
            }
            ClassKind::Protected => out.push(Diagnostic::new(
                Code::N002,
                class.name.clone(),
                "protected composite: no concurrency rule applies to its parts",
            )),
            ClassKind::Observer => {}
        }
    }
    out
}

/// W011.
pub fn rule_observer(model: &Model) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for class in model
        .classes
        .iter()
        .filter(|c| c.kind == ClassKind::Observer && c.is_composite())
    {
        let offenders: Vec<String> = class
            .parts
            .iter()
            .filter_map(|p| {
                let t = model.class(&p.ty)?;
                (t.kind != ClassKind::Observer).then(|| format!("{}: {}", p.name, t.kind))
            })
            .collect();
        if !offenders.is_empty() {
            out.push(Diagnostic::new(
                Code::W011,
                class.name.clone(),
                format!(
                    "observer composite `{}` may contain only observer parts ({})",
                    class.name,
                    offenders.join(", ")
                ),
            ));
        }
    }
    out
}

/// N001: ports inside a composite that no link leaves.
fn unconnected_port_notes(ts: &TypeSystem<'_>, links: &[LinkInfo<'_>]) -> Vec<Diagnostic> {
    let model = ts.model();
    let starting: BTreeSet<String> = links_by_origin_port(links).into_keys().collect();
    let mut out = Vec::new();
    for class in model.classes.iter().filter(|c| c.is_composite()) {
        for port in class.ports.iter().filter(|p| !p.reversed) {
            let path = format!("{}.{}", class.name, port.name);
            if !starting.contains(&path) {
                out.push(Diagnostic::new(
                    Code::N001,
                    path,
                    "no link leaves this provided port; requests are handed to the owning component",
                ));
            }
        }
        for part in &class.parts {
            let Some(ty) = model.class(&part.ty) else {
                continue;
            };
            for port in ty.ports.iter().filter(|p| p.reversed) {
                let path = format!("{}.{}.{}", class.name, part.name, port.name);
                if !starting.contains(&path) {
                    out.push(Diagnostic::new(
                        Code::N001,
                        path,
                        "no link leaves this required port; outgoing requests have no destination",
                    ));
                }
            }
        }
    }
    out
}
