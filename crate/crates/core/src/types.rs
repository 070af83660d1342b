//! Derived type system. Computes generalization closures and the interface
//! sets of ports and classes. Links are classified here, along with their
//! direction and transported interfaces.
//!
//! Interface groups are dropped from every set computed here. Required
//! (reversed) ports use the same closure as provided ones; the direction is
//! carried by the port's `reversed` flag and by [`LinkKind`] only.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::model::{
    Association, Class, ClassifierRef, Connector, ConnectorId, EndRef, Model, Part, Port,
};

pub type InterfaceSet<'m> = BTreeSet<&'m str>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LinkKind {
    AssemblyPartPart,
    InboundDelegationPortPort,
    OutboundDelegationPortPort,
    AssemblyPortPort,
    AssemblyPartProvidedPort,
    AssemblyPartRequiredPort,
    InboundDelegationPartPort,
    OutboundDelegationPartPort,
    Forbidden,
}

impl LinkKind {
    pub fn is_forbidden(self) -> bool {
        self == LinkKind::Forbidden
    }

    pub fn describe(self) -> &'static str {
        match self {
            LinkKind::AssemblyPartPart => "assembly link between parts",
            LinkKind::InboundDelegationPortPort => "inbound delegation link between provided ports",
            LinkKind::OutboundDelegationPortPort => {
                "outbound delegation link between required ports"
            }
            LinkKind::AssemblyPortPort => "assembly link between provided-required ports",
            LinkKind::AssemblyPartProvidedPort => "assembly link between part and provided port",
            LinkKind::AssemblyPartRequiredPort => "assembly link between part and required port",
            LinkKind::InboundDelegationPartPort => {
                "inbound delegation link between part and provided port"
            }
            LinkKind::OutboundDelegationPartPort => {
                "outbound delegation link between part and required port"
            }
            LinkKind::Forbidden => "forbidden",
        }
    }
}

impl fmt::Display for LinkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    End1,
    End2,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::End1 => Side::End2,
            Side::End2 => Side::End1,
        }
    }
}

/// Where requests enter a connector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkOrigin {
    FromProvidedPort(Side),
    FromRequiredPort(Side),
    FromPart(Side),
    Undirected,
}

impl LinkOrigin {
    pub fn side(self) -> Option<Side> {
        match self {
            LinkOrigin::FromProvidedPort(s)
            | LinkOrigin::FromRequiredPort(s)
            | LinkOrigin::FromPart(s) => Some(s),
            LinkOrigin::Undirected => None,
        }
    }

    pub fn is_from_port(self) -> bool {
        matches!(
            self,
            LinkOrigin::FromProvidedPort(_) | LinkOrigin::FromRequiredPort(_)
        )
    }

    pub fn is_from_part(self) -> bool {
        matches!(self, LinkOrigin::FromPart(_))
    }
}

/// The dynamic type of a connector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportedSet<'m> {
    pub interfaces: InterfaceSet<'m>,
    /// `false` for part-part links, whose set is undefined.
    pub computable: bool,
}

impl<'m> TransportedSet<'m> {
    fn undefined() -> Self {
        TransportedSet {
            interfaces: BTreeSet::new(),
            computable: false,
        }
    }
}

/// A connector end resolved against its owning class.
#[derive(Debug, Clone, Copy)]
pub enum LinkEnd<'m> {
    Part(&'m Part),
    PartPort(&'m Part, &'m Port),
    OwnPort(&'m Port),
}

impl<'m> LinkEnd<'m> {
    pub fn port(&self) -> Option<&'m Port> {
        match self {
            LinkEnd::Part(_) => None,
            LinkEnd::PartPort(_, p) | LinkEnd::OwnPort(p) => Some(p),
        }
    }

    pub fn part(&self) -> Option<&'m Part> {
        match self {
            LinkEnd::Part(p) | LinkEnd::PartPort(p, _) => Some(p),
            LinkEnd::OwnPort(_) => None,
        }
    }

    pub fn is_own_port(&self) -> bool {
        matches!(self, LinkEnd::OwnPort(_))
    }
}

impl fmt::Display for LinkEnd<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinkEnd::Part(p) => f.write_str(&p.name),
            LinkEnd::PartPort(part, port) => write!(f, "{}.{}", part.name, port.name),
            LinkEnd::OwnPort(p) => f.write_str(&p.name),
        }
    }
}

/// Everything derived for one connector.
#[derive(Debug, Clone)]
pub struct LinkInfo<'m> {
    pub id: ConnectorId,
    pub owner: &'m Class,
    pub connector: &'m Connector,
    pub end1: LinkEnd<'m>,
    pub end2: LinkEnd<'m>,
    pub kind: LinkKind,
    pub origin: LinkOrigin,
    pub association: Option<&'m Association>,
    pub transported: TransportedSet<'m>,
}

impl<'m> LinkInfo<'m> {
    pub fn end(&self, side: Side) -> LinkEnd<'m> {
        match side {
            Side::End1 => self.end1,
            Side::End2 => self.end2,
        }
    }

    /// Start end of the link, per its direction.
    pub fn start(&self) -> Option<LinkEnd<'m>> {
        self.origin.side().map(|s| self.end(s))
    }

    /// End opposite to the start.
    pub fn far(&self) -> Option<LinkEnd<'m>> {
        self.origin.side().map(|s| self.end(s.other()))
    }

    /// Port the link starts from, if it starts from a port.
    pub fn origin_port(&self) -> Option<&'m Port> {
        if self.origin.is_from_port() {
            self.start().and_then(|e| e.port())
        } else {
            None
        }
    }

    pub fn is_typed(&self) -> bool {
        self.association.is_some()
    }
}

/// Derived computations over one model. Assumes integrity holds; cyclic
/// generalizations are tolerated (each node is visited once) but produce
/// closures that include the node itself.
pub struct TypeSystem<'m> {
    model: &'m Model,
    parents: HashMap<&'m str, InterfaceSet<'m>>,
    class_interfaces: HashMap<&'m str, InterfaceSet<'m>>,
    empty: InterfaceSet<'m>,
}

impl<'m> TypeSystem<'m> {
    pub fn new(model: &'m Model) -> Self {
        let mut parents = HashMap::new();
        let names = model
            .interfaces
            .iter()
            .map(|i| i.name.as_str())
            .chain(model.classes.iter().map(|c| c.name.as_str()));
        for name in names {
            parents.insert(name, Self::compute_parents(model, name));
        }
        let mut ts = TypeSystem {
            model,
            parents,
            class_interfaces: HashMap::new(),
            empty: BTreeSet::new(),
        };
        let class_interfaces = model
            .classes
            .iter()
            .map(|c| (c.name.as_str(), ts.compute_class_interfaces(c)))
            .collect();
        ts.class_interfaces = class_interfaces;
        ts
    }

    pub fn model(&self) -> &'m Model {
        self.model
    }

    fn compute_parents(model: &'m Model, name: &str) -> InterfaceSet<'m> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<&'m str> = model
            .classifier(name)
            .map(|c| c.generals().iter().map(String::as_str).collect())
            .unwrap_or_default();
        while let Some(n) = stack.pop() {
            if out.insert(n) {
                if let Some(c) = model.classifier(n) {
                    stack.extend(c.generals().iter().map(String::as_str));
                }
            }
        }
        out
    }

    fn is_plain_interface(&self, name: &str) -> bool {
        self.model.interface(name).is_some_and(|i| !i.is_group)
    }

    /// Transitive closure of generals, excluding the classifier itself.
    pub fn parents_of(&self, name: &str) -> &InterfaceSet<'m> {
        self.parents.get(name).unwrap_or(&self.empty)
    }

    /// `{i} ∪ parents(i)`, restricted to non-group interfaces.
    pub fn interface_closure(&self, name: &str) -> InterfaceSet<'m> {
        let Some(iface) = self.model.interface(name) else {
            return BTreeSet::new();
        };
        std::iter::once(iface.name.as_str())
            .chain(self.parents_of(name).iter().copied())
            .filter(|n| self.is_plain_interface(n))
            .collect()
    }

    fn compute_class_interfaces(&self, class: &'m Class) -> InterfaceSet<'m> {
        let mut out: InterfaceSet<'m> = BTreeSet::new();
        for r in &class.realizes {
            out.insert(r.as_str());
            out.extend(self.parents_of(r).iter().copied());
        }
        for parent in self.parents_of(&class.name) {
            if let Some(pc) = self.model.class(parent) {
                for r in &pc.realizes {
                    out.insert(r.as_str());
                    out.extend(self.parents_of(r).iter().copied());
                }
            }
        }
        out.retain(|n| self.is_plain_interface(n));
        out
    }

    /// Interfaces directly or indirectly realized by a class.
    pub fn class_interfaces(&self, name: &str) -> &InterfaceSet<'m> {
        self.class_interfaces.get(name).unwrap_or(&self.empty)
    }

    /// Interfaces carried by a port: its contract and the contract's parents.
    pub fn port_interfaces(&self, port: &Port) -> InterfaceSet<'m> {
        self.interface_closure(&port.contract)
    }

    /// Interfaces of any classifier: closure for an interface, realized set for a class.
    pub fn classifier_interfaces(&self, name: &str) -> InterfaceSet<'m> {
        match self.model.classifier(name) {
            Some(ClassifierRef::Interface(_)) => self.interface_closure(name),
            Some(ClassifierRef::Class(_)) => self.class_interfaces(name).clone(),
            None => BTreeSet::new(),
        }
    }

    /// Interfaces used by a class (its `uses` and their parents).
    pub fn used_interfaces(&self, class: &Class) -> InterfaceSet<'m> {
        let mut out = BTreeSet::new();
        for u in &class.uses {
            out.extend(self.interface_closure(u));
        }
        out
    }

    /// Whether a link end typed `sub` may stand where an association end typed
    /// `sup` is expected.
    pub fn classifier_compatible(&self, sub: &str, sup: &str) -> bool {
        match (self.model.classifier(sub), self.model.classifier(sup)) {
            (Some(ClassifierRef::Interface(_)), Some(ClassifierRef::Interface(_))) => {
                sub == sup || self.interface_closure(sub).contains(sup)
            }
            (Some(ClassifierRef::Class(_)), Some(ClassifierRef::Interface(_))) => {
                self.class_interfaces(sub).contains(sup)
            }
            (Some(ClassifierRef::Class(_)), Some(ClassifierRef::Class(_))) => {
                sub == sup || self.parents_of(sub).contains(sup)
            }
            _ => false,
        }
    }

    /// A port is compatible with an interface when it carries the whole closure of it.
    pub fn port_compatible(&self, port: &Port, target: &str) -> bool {
        if self.model.interface(target).is_none() {
            return false;
        }
        let carried = self.port_interfaces(port);
        self.interface_closure(target).is_subset(&carried)
    }

    pub fn resolve_end(&self, owner: &'m Class, end: &EndRef) -> Option<LinkEnd<'m>> {
        match (&end.part, &end.port) {
            (Some(part), None) => owner.part(part).map(LinkEnd::Part),
            (Some(part), Some(port)) => {
                let part = owner.part(part)?;
                let ty = self.model.class(&part.ty)?;
                ty.port(port).map(|p| LinkEnd::PartPort(part, p))
            }
            (None, Some(port)) => owner.port(port).map(LinkEnd::OwnPort),
            (None, None) => None,
        }
    }

    pub fn classify_link(&self, id: ConnectorId) -> LinkKind {
        self.link(id).map(|l| l.kind).unwrap_or(LinkKind::Forbidden)
    }

    pub fn link_origin(&self, id: ConnectorId) -> LinkOrigin {
        self.link(id).map(|l| l.origin).unwrap_or(LinkOrigin::Undirected)
    }

    pub fn transported_interfaces(&self, id: ConnectorId) -> TransportedSet<'m> {
        self.link(id)
            .map(|l| l.transported)
            .unwrap_or_else(TransportedSet::undefined)
    }

    /// Full derivation for a connector; `None` when an end does not resolve.
    pub fn link(&self, id: ConnectorId) -> Option<LinkInfo<'m>> {
        let owner = self.model.classes.get(id.class)?;
        let connector = owner.connectors.get(id.index)?;
        let end1 = self.resolve_end(owner, &connector.end1)?;
        let end2 = self.resolve_end(owner, &connector.end2)?;
        let (kind, mut origin) = classify(end1, end2);
        let association = connector
            .association
            .as_deref()
            .and_then(|a| self.model.association(a));
        // A part-part link follows its directed association when only the
        // reversed reading of the ends is compatible with it.
        if let (LinkKind::AssemblyPartPart, Some(a)) = (kind, association) {
            if !a.is_bidirectional() && !a.is_not_navigable() {
                if let (Some(p1), Some(p2)) = (end1.part(), end2.part()) {
                    let (start, end) = a.oriented();
                    let forward = self.classifier_compatible(&p1.ty, &start.ty)
                        && self.classifier_compatible(&p2.ty, &end.ty);
                    let backward = self.classifier_compatible(&p2.ty, &start.ty)
                        && self.classifier_compatible(&p1.ty, &end.ty);
                    if !forward && backward {
                        origin = LinkOrigin::FromPart(Side::End2);
                    }
                }
            }
        }
        let mut info = LinkInfo {
            id,
            owner,
            connector,
            end1,
            end2,
            kind,
            origin,
            association,
            transported: TransportedSet::undefined(),
        };
        info.transported = self.compute_transported(&info);
        Some(info)
    }

    /// All connectors of the model that resolve, in declaration order.
    pub fn links(&self) -> Vec<LinkInfo<'m>> {
        self.model
            .connector_ids()
            .filter_map(|id| self.link(id))
            .collect()
    }

    fn end_interfaces(&self, end: LinkEnd<'m>) -> InterfaceSet<'m> {
        match end {
            LinkEnd::Part(part) => self.class_interfaces(&part.ty).clone(),
            LinkEnd::PartPort(_, port) | LinkEnd::OwnPort(port) => self.port_interfaces(port),
        }
    }

    fn compute_transported(&self, info: &LinkInfo<'m>) -> TransportedSet<'m> {
        if info.kind.is_forbidden() || info.kind == LinkKind::AssemblyPartPart {
            return TransportedSet::undefined();
        }
        // The port whose set is intersected: the starting port of a port-port
        // link, or the only port of a part-port link.
        let (port_end, other_end) = match (info.end1.port(), info.end2.port()) {
            (Some(_), Some(_)) => {
                let side = info.origin.side().unwrap_or(Side::End1);
                (info.end(side), info.end(side.other()))
            }
            (Some(_), None) => (info.end1, info.end2),
            (None, Some(_)) => (info.end2, info.end1),
            (None, None) => return TransportedSet::undefined(),
        };
        let left = self.end_interfaces(port_end);
        let right = match info.association {
            Some(a) => self.classifier_interfaces(a.pointed_type()),
            None => self.end_interfaces(other_end),
        };
        TransportedSet {
            interfaces: left.intersection(&right).copied().collect(),
            computable: true,
        }
    }
}

/// Link kind and direction from the shapes and directions of both ends.
fn classify(end1: LinkEnd<'_>, end2: LinkEnd<'_>) -> (LinkKind, LinkOrigin) {
    use LinkEnd::*;
    use LinkKind::*;
    use LinkOrigin::*;

    match (end1, end2) {
        (Part(_), Part(_)) => (AssemblyPartPart, FromPart(Side::End1)),
        (OwnPort(_), OwnPort(_)) => (Forbidden, Undirected),
        (OwnPort(own), PartPort(_, inner)) | (PartPort(_, inner), OwnPort(own)) => {
            let own_side = if matches!(end1, OwnPort(_)) {
                Side::End1
            } else {
                Side::End2
            };
            match (own.reversed, inner.reversed) {
                (false, false) => (InboundDelegationPortPort, FromProvidedPort(own_side)),
                (true, true) => (OutboundDelegationPortPort, FromRequiredPort(own_side.other())),
                _ => (Forbidden, Undirected),
            }
        }
        (PartPort(_, p1), PartPort(_, p2)) => match (p1.reversed, p2.reversed) {
            (true, false) => (AssemblyPortPort, FromRequiredPort(Side::End1)),
            (false, true) => (AssemblyPortPort, FromRequiredPort(Side::End2)),
            _ => (Forbidden, Undirected),
        },
        (Part(_), PartPort(_, port)) | (PartPort(_, port), Part(_)) => {
            let (part_side, port_side) = if matches!(end1, Part(_)) {
                (Side::End1, Side::End2)
            } else {
                (Side::End2, Side::End1)
            };
            if port.reversed {
                (AssemblyPartRequiredPort, FromRequiredPort(port_side))
            } else {
                (AssemblyPartProvidedPort, FromPart(part_side))
            }
        }
        (Part(_), OwnPort(port)) | (OwnPort(port), Part(_)) => {
            let (part_side, port_side) = if matches!(end1, Part(_)) {
                (Side::End1, Side::End2)
            } else {
                (Side::End2, Side::End1)
            };
            if port.reversed {
                (OutboundDelegationPartPort, FromPart(part_side))
            } else {
                (InboundDelegationPartPort, FromProvidedPort(port_side))
            }
        }
    }
}
