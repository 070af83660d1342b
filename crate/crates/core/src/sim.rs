//! Routing simulator.
//!
//! A root class is expanded into component and port instances, and every
//! connector becomes a set of bindings. Requests then travel hop by hop along
//! those bindings until they reach a component that provides their interface,
//! leave the system through an unconnected required port of the root, or get
//! stuck.
//!
//! Forwarding follows the default port behaviour: a port holding a request
//! for interface `I` forwards it over its `deleg_I` binding, falling back to
//! the first explicit association carrying `I`. A provided port that no link
//! leaves hands the request to its owning component. A component emitting a
//! request uses its own association-typed bindings first, then its first
//! required port carrying the interface.
//!
//! Scheduling is a total order over holders: every component and port
//! instance gets a priority equal to its instantiation rank (depth-first,
//! declaration order), and each step fires the single highest-priority
//! holder that has a request in transit.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::diagnostic::Diagnostic;
use crate::integrity::{synthesize_deleg_associations, validate_integrity};
use crate::model::{Model, DELEG_PREFIX};
use crate::types::{LinkEnd, LinkInfo, LinkKind, TypeSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Holder {
    Component(usize),
    Port(usize),
    /// Outside the root component.
    Env,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentInstance {
    pub id: usize,
    pub path: String,
    pub class: String,
    pub parent: Option<usize>,
    pub priority: usize,
    /// Interfaces the class provides.
    pub interfaces: BTreeSet<String>,
    /// Interfaces the class uses.
    pub uses: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortInstance {
    pub id: usize,
    pub path: String,
    pub port: String,
    pub owner: usize,
    pub reversed: bool,
    pub priority: usize,
    pub interfaces: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelegBinding {
    pub holder: Holder,
    pub association: String,
    pub target: Holder,
    pub interface: String,
    /// `Class#i` of the connector realised by this binding.
    pub connector: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Status {
    InTransit,
    Delivered,
    Stuck,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::InTransit => "inTransit",
            Status::Delivered => "delivered",
            Status::Stuck => "stuck",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Request {
    pub id: usize,
    pub interface: String,
    pub operation: String,
    pub location: Holder,
    /// Number of port instances the request has left.
    pub hops: usize,
    pub status: Status,
    /// Set while a request injected at a component has not left it yet.
    pub outbound: bool,
    pub path: Vec<Holder>,
    pub reason: Option<String>,
    pub parent: Option<usize>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("unknown root class `{0}`")]
    UnknownRoot(String),
    #[error("model has integrity errors:\n{}", render(.0))]
    Integrity(Vec<Diagnostic>),
    #[error("no component or port instance at `{0}`")]
    UnknownLocation(String),
    #[error("unknown interface `{0}`")]
    UnknownInterface(String),
    #[error("`{location}` does not accept interface `{interface}`")]
    NotAccepted { location: String, interface: String },
    #[error("request {request} revisits port `{port}`: delegation cycle")]
    Cycle { request: usize, port: String },
    #[error("request {request} exceeded the hop bound of {bound}")]
    HopBound { request: usize, bound: usize },
}

fn render(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceGraph {
    pub root: String,
    pub components: Vec<ComponentInstance>,
    pub ports: Vec<PortInstance>,
    pub bindings: Vec<DelegBinding>,
    pub requests: Vec<Request>,
    operations: BTreeMap<String, Vec<String>>,
    steps: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Event {
    pub step: usize,
    pub request: usize,
    pub from: String,
    pub to: String,
    /// Association used for the hop; `None` for hops between a component
    /// and its own port, and for requests leaving the root.
    pub via: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RequestOutcome {
    pub request: usize,
    pub interface: String,
    pub operation: String,
    pub status: Status,
    pub location: String,
    pub hops: usize,
    pub path: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trace {
    pub events: Vec<Event>,
    pub outcomes: Vec<RequestOutcome>,
}

#[derive(Serialize)]
struct Summary<'a> {
    summary: BTreeMap<String, usize>,
    requests: &'a [RequestOutcome],
}

impl Trace {
    pub fn count(&self, status: Status) -> usize {
        self.outcomes.iter().filter(|o| o.status == status).count()
    }

    /// One JSON object per event, then a summary object with per-status counts.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("event serializes"));
            out.push('\n');
        }
        let mut summary = BTreeMap::new();
        for s in [Status::Delivered, Status::InTransit, Status::Stuck] {
            summary.insert(s.to_string(), self.count(s));
        }
        let tail = Summary {
            summary,
            requests: &self.outcomes,
        };
        out.push_str(&serde_json::to_string(&tail).expect("summary serializes"));
        out.push('\n');
        out
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            let via = e.via.as_deref().unwrap_or("-");
            out.push_str(&format!(
                "step {:>3}  req {:>3}  {} -> {}  via {}\n",
                e.step, e.request, e.from, e.to, via
            ));
        }
        for o in &self.outcomes {
            out.push_str(&format!(
                "request {} {}.{}: {} at {}",
                o.request, o.interface, o.operation, o.status, o.location
            ));
            if let Some(r) = &o.reason {
                out.push_str(&format!(" ({r})"));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub request: usize,
    pub interface: String,
    pub location: String,
    pub path: Vec<String>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SafetyReport {
    pub safe: bool,
    pub requests: usize,
    pub violations: Vec<Violation>,
}

/// Expands `root` into an instance graph. The model must be free of
/// integrity errors; default `deleg_I` associations are synthesized here
/// when missing. Rule violations are not checked.
pub fn instantiate(model: &Model, root: &str) -> Result<InstanceGraph, SimError> {
    let integrity = validate_integrity(model);
    if !integrity.is_empty() {
        return Err(SimError::Integrity(integrity));
    }
    let model = synthesize_deleg_associations(model).map_err(SimError::Integrity)?;
    if model.class(root).is_none() {
        return Err(SimError::UnknownRoot(root.to_string()));
    }
    let ts = TypeSystem::new(&model);
    let links = ts.links();
    let mut b = Builder {
        ts: &ts,
        links: &links,
        graph: InstanceGraph {
            root: root.to_string(),
            components: Vec::new(),
            ports: Vec::new(),
            bindings: Vec::new(),
            requests: Vec::new(),
            operations: model
                .interfaces
                .iter()
                .map(|i| (i.name.clone(), i.operations.clone()))
                .collect(),
            steps: 0,
        },
        rank: 0,
        port_index: BTreeMap::new(),
        children: BTreeMap::new(),
    };
    b.expand(root, root.to_string(), None);
    for c in 0..b.graph.components.len() {
        b.bind(c);
    }
    Ok(b.graph)
}

struct Builder<'a, 'm> {
    ts: &'a TypeSystem<'m>,
    links: &'a [LinkInfo<'m>],
    graph: InstanceGraph,
    rank: usize,
    /// (component, port name) -> port instance
    port_index: BTreeMap<(usize, String), usize>,
    /// (component, part name) -> child instances
    children: BTreeMap<(usize, String), Vec<usize>>,
}

impl Builder<'_, '_> {
    fn expand(&mut self, class_name: &str, path: String, parent: Option<usize>) -> usize {
        let model = self.ts.model();
        let class = model.class(class_name).expect("integrity checked");
        let id = self.graph.components.len();
        self.graph.components.push(ComponentInstance {
            id,
            path: path.clone(),
            class: class.name.clone(),
            parent,
            priority: self.rank,
            interfaces: self
                .ts
                .class_interfaces(&class.name)
                .iter()
                .map(|s| s.to_string())
                .collect(),
            uses: self
                .ts
                .used_interfaces(class)
                .iter()
                .map(|s| s.to_string())
                .collect(),
        });
        self.rank += 1;
        for port in &class.ports {
            let pid = self.graph.ports.len();
            self.graph.ports.push(PortInstance {
                id: pid,
                path: format!("{path}.{}", port.name),
                port: port.name.clone(),
                owner: id,
                reversed: port.reversed,
                priority: self.rank,
                interfaces: self
                    .ts
                    .port_interfaces(port)
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
            });
            self.rank += 1;
            self.port_index.insert((id, port.name.clone()), pid);
        }
        for part in &class.parts {
            let mut ids = Vec::new();
            for k in 0..part.multiplicity {
                let child_path = if part.multiplicity == 1 {
                    format!("{path}.{}", part.name)
                } else {
                    format!("{path}.{}[{k}]", part.name)
                };
                ids.push(self.expand(&part.ty, child_path, Some(id)));
            }
            self.children.insert((id, part.name.clone()), ids);
        }
        id
    }

    fn holders(&self, component: usize, end: LinkEnd<'_>) -> Vec<Holder> {
        match end {
            LinkEnd::OwnPort(p) => vec![Holder::Port(self.port_index[&(component, p.name.clone())])],
            LinkEnd::Part(part) => self.children[&(component, part.name.clone())]
                .iter()
                .map(|&c| Holder::Component(c))
                .collect(),
            LinkEnd::PartPort(part, p) => self.children[&(component, part.name.clone())]
                .iter()
                .map(|&c| Holder::Port(self.port_index[&(c, p.name.clone())]))
                .collect(),
        }
    }

    fn bind(&mut self, component: usize) {
        let class = self.graph.components[component].class.clone();
        for link in self.links.iter().filter(|l| l.owner.name == class) {
            if link.kind.is_forbidden() {
                continue;
            }
            let connector = format!("{}#{}", class, link.id.index);
            let add = |holders: &[Holder], targets: &[Holder], assoc: &str, ifaces: &BTreeSet<&str>, out: &mut Vec<DelegBinding>| {
                for &h in holders {
                    for &t in targets {
                        for i in ifaces {
                            let association = if assoc.is_empty() {
                                format!("{DELEG_PREFIX}{i}")
                            } else {
                                assoc.to_string()
                            };
                            out.push(DelegBinding {
                                holder: h,
                                association,
                                target: t,
                                interface: i.to_string(),
                                connector: connector.clone(),
                            });
                        }
                    }
                }
            };
            let mut out = Vec::new();
            let assoc_name = link.association.map(|a| a.name.as_str()).unwrap_or("");
            if link.kind == LinkKind::AssemblyPartPart {
                let Some(assoc) = link.association else {
                    continue;
                };
                if assoc.is_not_navigable() {
                    continue;
                }
                let h1 = self.holders(component, link.end1);
                let h2 = self.holders(component, link.end2);
                let p2 = link.end2.part().expect("part end");
                if assoc.is_bidirectional() {
                    // each side reaches the association end its partner conforms to
                    let (a1, a2) = if self.ts.classifier_compatible(&p2.ty, &assoc.end2.ty) {
                        (&assoc.end1, &assoc.end2)
                    } else {
                        (&assoc.end2, &assoc.end1)
                    };
                    let to2 = self.ts.classifier_interfaces(&a2.ty);
                    let to1 = self.ts.classifier_interfaces(&a1.ty);
                    add(&h1, &h2, assoc_name, &to2, &mut out);
                    add(&h2, &h1, assoc_name, &to1, &mut out);
                } else {
                    let ifaces = self.ts.classifier_interfaces(assoc.pointed_type());
                    let (from, to) = match link.start().and_then(|s| s.part()) {
                        Some(p) if std::ptr::eq(p, p2) => (h2, h1),
                        _ => (h1, h2),
                    };
                    add(&from, &to, assoc_name, &ifaces, &mut out);
                }
            } else if let (Some(start), Some(far)) = (link.start(), link.far()) {
                let from = self.holders(component, start);
                let to = self.holders(component, far);
                add(&from, &to, assoc_name, &link.transported.interfaces, &mut out);
            }
            self.graph.bindings.extend(out);
        }
    }
}

impl InstanceGraph {
    pub fn holder_name(&self, h: Holder) -> String {
        match h {
            Holder::Component(c) => self.components[c].path.clone(),
            Holder::Port(p) => self.ports[p].path.clone(),
            Holder::Env => "env".to_string(),
        }
    }

    fn priority(&self, h: Holder) -> usize {
        match h {
            Holder::Component(c) => self.components[c].priority,
            Holder::Port(p) => self.ports[p].priority,
            Holder::Env => usize::MAX,
        }
    }

    pub fn root_component(&self) -> usize {
        0
    }

    /// Resolves an instance path (`A.e.pJL`, `A.d`, or relative to the root
    /// such as `e.pJL`).
    pub fn locate(&self, path: &str) -> Option<Holder> {
        let find = |p: &str| {
            self.ports
                .iter()
                .find(|x| x.path == p)
                .map(|x| Holder::Port(x.id))
                .or_else(|| {
                    self.components
                        .iter()
                        .find(|x| x.path == p)
                        .map(|x| Holder::Component(x.id))
                })
        };
        find(path).or_else(|| find(&format!("{}.{path}", self.root)))
    }

    pub fn bindings_of(&self, h: Holder) -> impl Iterator<Item = &DelegBinding> {
        self.bindings.iter().filter(move |b| b.holder == h)
    }

    /// Interfaces that can be injected at a holder: those a port carries, or
    /// those a component uses or reaches through its own bindings.
    pub fn accepted_interfaces(&self, h: Holder) -> BTreeSet<String> {
        match h {
            Holder::Port(p) => self.ports[p].interfaces.clone(),
            Holder::Component(c) => self
                .bindings_of(h)
                .map(|b| b.interface.clone())
                .chain(self.components[c].uses.iter().cloned())
                .collect(),
            Holder::Env => BTreeSet::new(),
        }
    }

    /// First reversed port of component `c` carrying `interface`.
    fn exit_port(&self, c: usize, interface: &str) -> Option<Holder> {
        self.ports
            .iter()
            .find(|p| p.owner == c && p.reversed && p.interfaces.contains(interface))
            .map(|p| Holder::Port(p.id))
    }

    pub fn inject(&mut self, at: Holder, interface: &str, operation: Option<&str>) -> Result<usize, SimError> {
        if !self.operations.contains_key(interface) {
            return Err(SimError::UnknownInterface(interface.to_string()));
        }
        if at == Holder::Env || !self.accepted_interfaces(at).contains(interface) {
            return Err(SimError::NotAccepted {
                location: self.holder_name(at),
                interface: interface.to_string(),
            });
        }
        self.inject_unchecked(at, interface, operation)
    }

    /// Enqueues a request without checking that the location accepts the
    /// interface. Useful for replaying a suite recorded on another graph;
    /// a request the location cannot route ends up stuck.
    pub fn inject_unchecked(
        &mut self,
        at: Holder,
        interface: &str,
        operation: Option<&str>,
    ) -> Result<usize, SimError> {
        let ops = self
            .operations
            .get(interface)
            .ok_or_else(|| SimError::UnknownInterface(interface.to_string()))?;
        if at == Holder::Env {
            return Err(SimError::UnknownLocation("env".to_string()));
        }
        let operation = operation
            .map(str::to_string)
            .or_else(|| ops.first().cloned())
            .unwrap_or_else(|| "call".to_string());
        let id = self.requests.len();
        self.requests.push(Request {
            id,
            interface: interface.to_string(),
            operation,
            location: at,
            hops: 0,
            status: Status::InTransit,
            outbound: matches!(at, Holder::Component(_)),
            path: vec![at],
            reason: None,
            parent: None,
        });
        Ok(id)
    }

    pub fn inject_at(&mut self, path: &str, interface: &str) -> Result<usize, SimError> {
        let at = self
            .locate(path)
            .ok_or_else(|| SimError::UnknownLocation(path.to_string()))?;
        self.inject(at, interface, None)
    }

    /// Targets for a request of `interface` leaving `h`: every binding under
    /// the `deleg_I` association, or else under the first explicit
    /// association carrying the interface.
    fn route(&self, h: Holder, interface: &str) -> Option<(String, Vec<Holder>)> {
        let carrying: Vec<&DelegBinding> = self
            .bindings_of(h)
            .filter(|b| b.interface == interface)
            .collect();
        let deleg = format!("{DELEG_PREFIX}{interface}");
        let assoc = if carrying.iter().any(|b| b.association == deleg) {
            deleg
        } else {
            carrying.first()?.association.clone()
        };
        let targets = carrying
            .iter()
            .filter(|b| b.association == assoc)
            .map(|b| b.target)
            .collect();
        Some((assoc, targets))
    }

    fn next_request(&self) -> Option<usize> {
        self.requests
            .iter()
            .filter(|r| r.status == Status::InTransit)
            .min_by_key(|r| (self.priority(r.location), r.id))
            .map(|r| r.id)
    }

    /// Fires the highest-priority enabled forwarding action. Returns `None`
    /// when no request is in transit.
    pub fn step(&mut self) -> Result<Option<Vec<Event>>, SimError> {
        let Some(rid) = self.next_request() else {
            return Ok(None);
        };
        self.steps += 1;
        let step = self.steps;
        let req = self.requests[rid].clone();
        let here = req.location;
        let moves: Option<(Option<String>, Vec<Holder>)> = match here {
            Holder::Component(c) if req.outbound => match self.route(here, &req.interface) {
                Some((a, t)) => Some((Some(a), t)),
                None => self.exit_port(c, &req.interface).map(|p| (None, vec![p])),
            },
            Holder::Port(p) => match self.route(here, &req.interface) {
                Some((a, t)) => Some((Some(a), t)),
                None if self.bindings_of(here).next().is_none() => {
                    let port = &self.ports[p];
                    if !port.reversed {
                        Some((None, vec![Holder::Component(port.owner)]))
                    } else if port.owner == self.root_component() {
                        Some((None, vec![Holder::Env]))
                    } else {
                        None
                    }
                }
                None => None,
            },
            _ => unreachable!("arrivals are settled when they happen"),
        };
        let Some((via, targets)) = moves else {
            let reason = match here {
                Holder::Port(p) if self.ports[p].reversed && self.bindings_of(here).next().is_none() => {
                    "required port has no outgoing link".to_string()
                }
                _ => format!("no binding for interface {}", req.interface),
            };
            let r = &mut self.requests[rid];
            r.status = Status::Stuck;
            r.reason = Some(reason);
            return Ok(Some(Vec::new()));
        };
        let mut events = Vec::new();
        for (k, target) in targets.into_iter().enumerate() {
            let id = if k == 0 {
                rid
            } else {
                let mut copy = req.clone();
                copy.id = self.requests.len();
                copy.parent = Some(rid);
                self.requests.push(copy);
                self.requests.len() - 1
            };
            events.push(Event {
                step,
                request: id,
                from: self.holder_name(here),
                to: self.holder_name(target),
                via: via.clone(),
            });
            self.arrive(id, target)?;
        }
        Ok(Some(events))
    }

    fn arrive(&mut self, id: usize, target: Holder) -> Result<(), SimError> {
        let bound = self.ports.len();
        let left_port = matches!(self.requests[id].location, Holder::Port(_));
        let revisit = matches!(target, Holder::Port(_)) && self.requests[id].path.contains(&target);
        let r = &mut self.requests[id];
        if left_port {
            r.hops += 1;
        }
        r.outbound = false;
        r.location = target;
        r.path.push(target);
        if revisit {
            return Err(SimError::Cycle {
                request: id,
                port: self.holder_name(target),
            });
        }
        if r.hops > bound {
            return Err(SimError::HopBound { request: id, bound });
        }
        match target {
            Holder::Env => r.status = Status::Delivered,
            Holder::Component(c) => {
                if self.components[c].interfaces.contains(&r.interface) {
                    r.status = Status::Delivered;
                } else {
                    r.status = Status::Stuck;
                    r.reason = Some(format!(
                        "{} does not provide {}",
                        self.components[c].class, r.interface
                    ));
                }
            }
            Holder::Port(_) => {}
        }
        Ok(())
    }

    pub fn run_to_quiescence(&mut self) -> Result<Trace, SimError> {
        let mut events = Vec::new();
        while let Some(mut batch) = self.step()? {
            events.append(&mut batch);
        }
        Ok(Trace {
            events,
            outcomes: self.outcomes(),
        })
    }

    pub fn outcomes(&self) -> Vec<RequestOutcome> {
        self.requests
            .iter()
            .map(|r| RequestOutcome {
                request: r.id,
                interface: r.interface.clone(),
                operation: r.operation.clone(),
                status: r.status,
                location: self.holder_name(r.location),
                hops: r.hops,
                path: r.path.iter().map(|h| self.holder_name(*h)).collect(),
                reason: r.reason.clone(),
            })
            .collect()
    }

    /// Every provided port of the root with every interface it carries.
    pub fn default_injections(&self) -> Vec<(Holder, String)> {
        self.ports
            .iter()
            .filter(|p| p.owner == self.root_component() && !p.reversed)
            .flat_map(|p| p.interfaces.iter().map(move |i| (Holder::Port(p.id), i.clone())))
            .collect()
    }

    /// Every port instance with every interface it carries, then every
    /// component with every interface its outgoing bindings carry.
    pub fn full_injections(&self) -> Vec<(Holder, String)> {
        let mut out: Vec<(Holder, String)> = self
            .ports
            .iter()
            .flat_map(|p| p.interfaces.iter().map(move |i| (Holder::Port(p.id), i.clone())))
            .collect();
        for c in &self.components {
            let h = Holder::Component(c.id);
            out.extend(self.accepted_interfaces(h).into_iter().map(|i| (h, i)));
        }
        out
    }
}

/// Routing type safety: every request delivered, and every receiver provides
/// the request's interface. For requests leaving through the root, the
/// boundary port they left through must carry the interface.
pub fn check_type_safety(trace: &Trace, graph: &InstanceGraph) -> SafetyReport {
    let mut violations = Vec::new();
    for r in trace.outcomes.iter().map(|o| &graph.requests[o.request]) {
        let fail = |message: String| Violation {
            request: r.id,
            interface: r.interface.clone(),
            location: graph.holder_name(r.location),
            path: r.path.iter().map(|h| graph.holder_name(*h)).collect(),
            message,
        };
        match (r.status, r.location) {
            (Status::Delivered, Holder::Component(c)) => {
                if !graph.components[c].interfaces.contains(&r.interface) {
                    violations.push(fail(format!(
                        "delivered to {} which does not provide {}",
                        graph.components[c].class, r.interface
                    )));
                }
            }
            (Status::Delivered, Holder::Env) => {
                let boundary = r.path.iter().rev().nth(1).copied();
                let ok = matches!(boundary, Some(Holder::Port(p)) if graph.ports[p].interfaces.contains(&r.interface));
                if !ok {
                    violations.push(fail("left the root through a port not carrying the interface".into()));
                }
            }
            (Status::Delivered, Holder::Port(_)) => {
                violations.push(fail("delivered at a port".into()));
            }
            (Status::Stuck, _) => violations.push(fail(format!(
                "stuck: {}",
                r.reason.clone().unwrap_or_default()
            ))),
            (Status::InTransit, _) => violations.push(fail("still in transit".into())),
        }
    }
    SafetyReport {
        safe: violations.is_empty(),
        requests: trace.outcomes.len(),
        violations,
    }
}

/// Instantiates `root`, injects every `(location, interface)` pair (the
/// default suite when `injections` is `None`) and runs to quiescence.
pub fn simulate(
    model: &Model,
    root: &str,
    injections: Option<&[(String, String)]>,
) -> Result<(InstanceGraph, Trace, SafetyReport), SimError> {
    let mut graph = instantiate(model, root)?;
    match injections {
        Some(list) => {
            for (loc, iface) in list {
                graph.inject_at(loc, iface)?;
            }
        }
        None => {
            for (h, i) in graph.default_injections() {
                graph.inject(h, &i, None)?;
            }
        }
    }
    let trace = graph.run_to_quiescence()?;
    let report = check_type_safety(&trace, &graph);
    Ok((graph, trace, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn binding_table(g: &InstanceGraph) -> BTreeSet<(String, String, String, String)> {
        g.bindings
            .iter()
            .map(|b| {
                (
                    g.holder_name(b.holder),
                    b.association.clone(),
                    g.holder_name(b.target),
                    b.interface.clone(),
                )
            })
            .collect()
    }

    fn row(h: &str, a: &str, t: &str, i: &str) -> (String, String, String, String) {
        (h.into(), a.into(), t.into(), i.into())
    }

    #[test]
    fn delegation_instances_and_bindings() {
        let g = instantiate(&fixtures::delegation(), "A").unwrap();
        let comps: Vec<&str> = g.components.iter().map(|c| c.path.as_str()).collect();
        assert_eq!(comps, ["A", "A.d", "A.e"]);
        let ports: Vec<&str> = g.ports.iter().map(|c| c.path.as_str()).collect();
        assert_eq!(ports, ["A.pIJL", "A.rA_K", "A.bak_rA_K", "A.e.pJL", "A.e.rK"]);
        let expected: BTreeSet<_> = [
            row("A.pIJL", "deleg_I", "A.d", "I"),
            row("A.pIJL", "deleg_J", "A.e.pJL", "J"),
            row("A.pIJL", "deleg_L", "A.e.pJL", "L"),
            row("A.d", "itsK", "A.rA_K", "K"),
            row("A.e.rK", "deleg_K", "A.rA_K", "K"),
            row("A.e.rK", "deleg_backup", "A.bak_rA_K", "K"),
        ]
        .into_iter()
        .collect();
        assert_eq!(binding_table(&g), expected);
    }

    #[test]
    fn leaf_has_no_bindings() {
        let g = instantiate(&fixtures::leaf(), "D").unwrap();
        assert_eq!(g.components.len(), 1);
        assert!(g.bindings.is_empty());
    }

    #[test]
    fn injection_contract() {
        let mut g = instantiate(&fixtures::delegation(), "A").unwrap();
        assert!(g.inject_at("A.pIJL", "I").is_ok());
        assert!(matches!(g.inject_at("A.pIJL", "K"), Err(SimError::NotAccepted { .. })));
        assert!(g.inject_at("A.d", "K").is_ok());
        assert!(matches!(g.inject_at("A.nope", "K"), Err(SimError::UnknownLocation(_))));
        assert!(matches!(g.inject_at("A.d", "J"), Err(SimError::NotAccepted { .. })));
    }

    #[test]
    fn component_leaves_through_its_required_port() {
        let mut g = instantiate(&fixtures::delegation(), "A").unwrap();
        g.inject_at("e", "K").unwrap();
        let t = g.run_to_quiescence().unwrap();
        let hops: Vec<(&str, &str, Option<&str>)> = t
            .events
            .iter()
            .map(|e| (e.from.as_str(), e.to.as_str(), e.via.as_deref()))
            .collect();
        assert_eq!(
            hops,
            [
                ("A.e", "A.e.rK", None),
                ("A.e.rK", "A.rA_K", Some("deleg_K")),
                ("A.rA_K", "env", None)
            ]
        );
        assert_eq!(t.outcomes[0].hops, 2);
    }

    #[test]
    fn untyped_user_without_route_is_stuck() {
        let mut m = fixtures::delegation();
        m.classes.iter_mut().find(|c| c.name == "A").unwrap().connectors.remove(2);
        let mut g = instantiate(&m, "A").unwrap();
        g.inject_at("d", "K").unwrap();
        let t = g.run_to_quiescence().unwrap();
        assert!(t.events.is_empty());
        assert_eq!(t.outcomes[0].status, Status::Stuck);
        assert_eq!(t.outcomes[0].location, "A.d");
    }

    #[test]
    fn request_i_reaches_d_in_one_step() {
        let mut g = instantiate(&fixtures::delegation(), "A").unwrap();
        g.inject_at("pIJL", "I").unwrap();
        let events = g.step().unwrap().unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].to, "A.d");
        assert_eq!(g.requests[0].status, Status::Delivered);
        assert_eq!(g.step().unwrap(), None);
    }

    #[test]
    fn request_j_goes_through_pjl() {
        let mut g = instantiate(&fixtures::delegation(), "A").unwrap();
        g.inject_at("pIJL", "J").unwrap();
        let t = g.run_to_quiescence().unwrap();
        let hops: Vec<(&str, &str)> = t.events.iter().map(|e| (e.from.as_str(), e.to.as_str())).collect();
        assert_eq!(hops, [("A.pIJL", "A.e.pJL"), ("A.e.pJL", "A.e")]);
        assert_eq!(t.count(Status::Delivered), 1);
    }

    #[test]
    fn outgoing_k_prefers_default_delegation() {
        let mut g = instantiate(&fixtures::delegation(), "A").unwrap();
        g.inject_at("e.rK", "K").unwrap();
        let t = g.run_to_quiescence().unwrap();
        assert_eq!(t.events[0].to, "A.rA_K");
        assert_eq!(t.events[0].via.as_deref(), Some("deleg_K"));
        assert_eq!(t.outcomes[0].location, "env");
        assert!(check_type_safety(&t, &g).safe);
    }

    #[test]
    fn all_four_interfaces_delivered() {
        let mut g = instantiate(&fixtures::delegation(), "A").unwrap();
        for i in ["I", "J", "L"] {
            g.inject_at("pIJL", i).unwrap();
        }
        g.inject_at("d", "K").unwrap();
        let t = g.run_to_quiescence().unwrap();
        assert_eq!(t.count(Status::Delivered), 4);
        assert_eq!(t.count(Status::Stuck), 0);
        assert!(check_type_safety(&t, &g).safe);
    }

    #[test]
    fn dropped_connector_leaves_j_stuck() {
        let mut m = fixtures::delegation();
        m.classes.iter_mut().find(|c| c.name == "A").unwrap().connectors.remove(1);
        let mut g = instantiate(&m, "A").unwrap();
        g.inject_at("pIJL", "J").unwrap();
        let t = g.run_to_quiescence().unwrap();
        assert_eq!(t.outcomes[0].status, Status::Stuck);
        assert_eq!(t.outcomes[0].location, "A.pIJL");
        let report = check_type_safety(&t, &g);
        assert!(!report.safe);
        assert_eq!(report.violations.len(), 1);
    }

    #[test]
    fn empty_pending_set() {
        let mut g = instantiate(&fixtures::delegation(), "A").unwrap();
        let t = g.run_to_quiescence().unwrap();
        assert!(t.events.is_empty());
        assert!(check_type_safety(&t, &g).safe);
    }

    #[test]
    fn multiplicity_duplicates_requests() {
        let m = fixtures::parse(
            "interface I {} class D { realizes I; } \
             class A { port p: I; part d: D x3; connector self.p, d; } root A;",
        );
        let mut g = instantiate(&m, "A").unwrap();
        g.inject_at("p", "I").unwrap();
        let t = g.run_to_quiescence().unwrap();
        let to: Vec<&str> = t.events.iter().map(|e| e.to.as_str()).collect();
        assert_eq!(to, ["A.d[0]", "A.d[1]", "A.d[2]"]);
        assert_eq!(t.count(Status::Delivered), 3);
    }

    #[test]
    fn misdelivery_is_stuck() {
        let m = fixtures::parse(
            "interface I {} class P { port q: I; port r: I reversed; } \
             class A { part x: P; part y: P; connector x.r, y.q; connector y.r, x.q; }",
        );
        let mut g = instantiate(&m, "A").unwrap();
        g.inject_at("x.r", "I").unwrap();
        let t = g.run_to_quiescence().unwrap();
        // y.q has no outgoing link and hands the request to y, which does not provide I
        assert_eq!(t.outcomes[0].status, Status::Stuck);
        assert_eq!(t.outcomes[0].location, "A.y");
        assert!(!check_type_safety(&t, &g).safe);
    }

    #[test]
    fn atm_full_suite_is_safe() {
        let mut g = instantiate(&fixtures::atm(), "ATM").unwrap();
        for (h, i) in g.full_injections() {
            g.inject(h, &i, None).unwrap();
        }
        let t = g.run_to_quiescence().unwrap();
        let report = check_type_safety(&t, &g);
        assert!(report.safe, "{:#?}", report.violations);
    }

    #[test]
    fn trace_json_lines() {
        let mut g = instantiate(&fixtures::delegation(), "A").unwrap();
        g.inject_at("pIJL", "I").unwrap();
        let t = g.run_to_quiescence().unwrap();
        let text = t.to_json_lines();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(
            lines[0],
            r#"{"step":1,"request":0,"from":"A.pIJL","to":"A.d","via":"deleg_I"}"#
        );
        assert!(lines[1].starts_with(r#"{"summary":{"delivered":1,"inTransit":0,"stuck":0}"#));
    }
}
