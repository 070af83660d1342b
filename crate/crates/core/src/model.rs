//! In-memory representation of a hierarchical component model.
//!
//! References between elements are by name. Part and port names are scoped to
//! their owning class, classifier names are global. Use [`Model::classifier`]
//! and friends for lookups; [`crate::integrity`] checks that every reference
//! resolves before anything downstream runs.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Current version of the JSON interchange format.
pub const FORMAT_VERSION: u32 = 1;

/// Prefix of the per-interface default forwarding association.
pub const DELEG_PREFIX: &str = "deleg_";

/// Position of an element in its source text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SourceSpan {
    pub file: String,
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

/// Optional source location attached to a model element.
///
/// Spans never take part in structural equality: two models parsed from
/// different files (or from JSON) compare equal when their elements do.
#[derive(Debug, Clone, Default)]
pub struct Span(pub Option<SourceSpan>);

impl PartialEq for Span {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl Eq for Span {}

impl Span {
    pub fn none() -> Self {
        Span(None)
    }

    pub fn at(file: &str, line: u32, column: u32) -> Self {
        Span(Some(SourceSpan {
            file: file.to_string(),
            line,
            column,
        }))
    }

    pub fn get(&self) -> Option<&SourceSpan> {
        self.0.as_ref()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassKind {
    Active,
    #[default]
    Passive,
    Protected,
    Observer,
}

impl ClassKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassKind::Active => "active",
            ClassKind::Passive => "passive",
            ClassKind::Protected => "protected",
            ClassKind::Observer => "observer",
        }
    }
}

impl fmt::Display for ClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Model {
    pub interfaces: Vec<Interface>,
    pub classes: Vec<Class>,
    pub associations: Vec<Association>,
    /// Entry composite used by the simulator when no root is given explicitly.
    pub root: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Interface {
    pub name: String,
    pub generals: Vec<String>,
    /// Bundling interface, ignored by every type computation.
    pub is_group: bool,
    pub operations: Vec<String>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Class {
    pub name: String,
    pub kind: ClassKind,
    pub generals: Vec<String>,
    pub realizes: Vec<String>,
    /// Required dependencies (`<<Usage>>`).
    pub uses: Vec<String>,
    pub attributes: Vec<Attribute>,
    pub parts: Vec<Part>,
    pub ports: Vec<Port>,
    pub connectors: Vec<Connector>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Attribute {
    pub name: String,
    pub ty: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Part {
    pub name: String,
    pub ty: String,
    pub multiplicity: u32,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Port {
    pub name: String,
    pub contract: String,
    /// `true` for a required (`<<reversed>>`) port.
    pub reversed: bool,
    pub span: Span,
}

impl Port {
    pub fn direction(&self) -> Direction {
        if self.reversed {
            Direction::Required
        } else {
            Direction::Provided
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Provided,
    Required,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Provided => f.write_str("provided"),
            Direction::Required => f.write_str("required"),
        }
    }
}

/// One end of a connector: `part`, `part.port` or `self.port`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct EndRef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub part: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub port: Option<String>,
}

impl EndRef {
    pub fn part(name: &str) -> Self {
        EndRef {
            part: Some(name.to_string()),
            port: None,
        }
    }

    pub fn part_port(part: &str, port: &str) -> Self {
        EndRef {
            part: Some(part.to_string()),
            port: Some(port.to_string()),
        }
    }

    pub fn own_port(port: &str) -> Self {
        EndRef {
            part: None,
            port: Some(port.to_string()),
        }
    }
}

impl fmt::Display for EndRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.part, &self.port) {
            (Some(part), Some(port)) => write!(f, "{part}.{port}"),
            (Some(part), None) => f.write_str(part),
            (None, Some(port)) => write!(f, "self.{port}"),
            (None, None) => f.write_str("<empty>"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connector {
    pub end1: EndRef,
    pub end2: EndRef,
    pub association: Option<String>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AssociationEnd {
    #[serde(rename = "type")]
    pub ty: String,
    pub navigable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Association {
    pub name: String,
    pub end1: AssociationEnd,
    pub end2: AssociationEnd,
    /// Set on the default `deleg_I` associations added by synthesis.
    pub synthesized: bool,
    pub span: Span,
}

impl Association {
    pub fn is_bidirectional(&self) -> bool {
        self.end1.navigable && self.end2.navigable
    }

    pub fn is_not_navigable(&self) -> bool {
        !self.end1.navigable && !self.end2.navigable
    }

    /// `(start, end)` of a directed association: the end is the navigable side.
    /// For a bidirectional or non-navigable association this is `(end1, end2)`.
    pub fn oriented(&self) -> (&AssociationEnd, &AssociationEnd) {
        if self.end1.navigable && !self.end2.navigable {
            (&self.end2, &self.end1)
        } else {
            (&self.end1, &self.end2)
        }
    }

    /// Type the association points at.
    pub fn pointed_type(&self) -> &str {
        &self.oriented().1.ty
    }

    pub fn deleg(interface: &str) -> Self {
        Association {
            name: format!("{DELEG_PREFIX}{interface}"),
            end1: AssociationEnd {
                ty: interface.to_string(),
                navigable: false,
            },
            end2: AssociationEnd {
                ty: interface.to_string(),
                navigable: true,
            },
            synthesized: true,
            span: Span::none(),
        }
    }
}

/// Borrowed view of a named classifier.
#[derive(Debug, Clone, Copy)]
pub enum ClassifierRef<'m> {
    Class(&'m Class),
    Interface(&'m Interface),
}

impl<'m> ClassifierRef<'m> {
    pub fn name(&self) -> &'m str {
        match self {
            ClassifierRef::Class(c) => &c.name,
            ClassifierRef::Interface(i) => &i.name,
        }
    }

    pub fn generals(&self) -> &'m [String] {
        match self {
            ClassifierRef::Class(c) => &c.generals,
            ClassifierRef::Interface(i) => &i.generals,
        }
    }

    pub fn is_interface(&self) -> bool {
        matches!(self, ClassifierRef::Interface(_))
    }
}

/// Location of a connector: owning class and declaration index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConnectorId {
    pub class: usize,
    pub index: usize,
}

impl Model {
    pub fn new() -> Self {
        Model::default()
    }

    pub fn interface(&self, name: &str) -> Option<&Interface> {
        self.interfaces.iter().find(|i| i.name == name)
    }

    pub fn class(&self, name: &str) -> Option<&Class> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.name == name)
    }

    pub fn association(&self, name: &str) -> Option<&Association> {
        self.associations.iter().find(|a| a.name == name)
    }

    pub fn classifier(&self, name: &str) -> Option<ClassifierRef<'_>> {
        if let Some(i) = self.interface(name) {
            return Some(ClassifierRef::Interface(i));
        }
        self.class(name).map(ClassifierRef::Class)
    }

    pub fn connector(&self, id: ConnectorId) -> &Connector {
        &self.classes[id.class].connectors[id.index]
    }

    /// All connectors in declaration order (class order, then connector order).
    pub fn connector_ids(&self) -> impl Iterator<Item = ConnectorId> + '_ {
        self.classes.iter().enumerate().flat_map(|(class, c)| {
            (0..c.connectors.len()).map(move |index| ConnectorId { class, index })
        })
    }

    pub fn connector_path(&self, id: ConnectorId) -> String {
        format!("{}#{}", self.classes[id.class].name, id.index)
    }

    /// Names of all interfaces that are not interface groups.
    pub fn plain_interfaces(&self) -> impl Iterator<Item = &Interface> {
        self.interfaces.iter().filter(|i| !i.is_group)
    }

    /// The same model without synthesized associations.
    pub fn without_synthesized(&self) -> Model {
        let mut m = self.clone();
        m.associations.retain(|a| !a.synthesized);
        m
    }
}

impl Class {
    pub fn new(name: &str) -> Self {
        Class {
            name: name.to_string(),
            ..Class::default()
        }
    }

    pub fn part(&self, name: &str) -> Option<&Part> {
        self.parts.iter().find(|p| p.name == name)
    }

    pub fn port(&self, name: &str) -> Option<&Port> {
        self.ports.iter().find(|p| p.name == name)
    }

    pub fn is_composite(&self) -> bool {
        !self.parts.is_empty()
    }
}

impl Part {
    pub fn new(name: &str, ty: &str) -> Self {
        Part {
            name: name.to_string(),
            ty: ty.to_string(),
            multiplicity: 1,
            span: Span::none(),
        }
    }
}

impl Port {
    pub fn new(name: &str, contract: &str, reversed: bool) -> Self {
        Port {
            name: name.to_string(),
            contract: contract.to_string(),
            reversed,
            span: Span::none(),
        }
    }
}

impl Connector {
    pub fn new(end1: EndRef, end2: EndRef, association: Option<&str>) -> Self {
        Connector {
            end1,
            end2,
            association: association.map(str::to_string),
            span: Span::none(),
        }
    }
}

impl Interface {
    pub fn new(name: &str, generals: &[&str]) -> Self {
        Interface {
            name: name.to_string(),
            generals: generals.iter().map(|s| s.to_string()).collect(),
            ..Interface::default()
        }
    }

    pub fn group(name: &str, generals: &[&str]) -> Self {
        Interface {
            is_group: true,
            ..Interface::new(name, generals)
        }
    }
}

/// A resolved element, as returned by [`crate::integrity::resolve`].
#[derive(Debug, Clone, Copy)]
pub enum Element<'m> {
    Class(&'m Class),
    Interface(&'m Interface),
    Association(&'m Association),
    Part { owner: &'m Class, part: &'m Part },
    Port { owner: &'m Class, port: &'m Port },
    Connector { id: ConnectorId, connector: &'m Connector },
}
