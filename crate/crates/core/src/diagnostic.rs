//! Structured diagnostics shared by the integrity checks and the rule engine.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Code {
    /// Dangling reference.
    E001,
    /// Duplicate name in a namespace.
    E002,
    /// Generalization cycle.
    E003,
    /// A `deleg_` association that does not have the default shape.
    E004,
    /// Unknown element path.
    E005,
    /// Malformed connector end.
    E006,
    /// Interface group with fewer than two generals.
    E007,
    /// Reference to an element of the wrong kind.
    E008,
    /// Part multiplicity below one.
    E009,
    /// A class that contains itself through its parts.
    E010,
    W000,
    W001,
    W002,
    W003,
    W004,
    W005,
    W006,
    W007,
    W008,
    W009,
    W010,
    W011,
    /// Port that originates no connector inside a composite.
    N001,
    /// Protected composite, exempt from the concurrency rules.
    N002,
}

impl Code {
    pub const RULES: [Code; 12] = [
        Code::W000,
        Code::W001,
        Code::W002,
        Code::W003,
        Code::W004,
        Code::W005,
        Code::W006,
        Code::W007,
        Code::W008,
        Code::W009,
        Code::W010,
        Code::W011,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Code::E001 => "E001",
            Code::E002 => "E002",
            Code::E003 => "E003",
            Code::E004 => "E004",
            Code::E005 => "E005",
            Code::E006 => "E006",
            Code::E007 => "E007",
            Code::E008 => "E008",
            Code::E009 => "E009",
            Code::E010 => "E010",
            Code::W000 => "W000",
            Code::W001 => "W001",
            Code::W002 => "W002",
            Code::W003 => "W003",
            Code::W004 => "W004",
            Code::W005 => "W005",
            Code::W006 => "W006",
            Code::W007 => "W007",
            Code::W008 => "W008",
            Code::W009 => "W009",
            Code::W010 => "W010",
            Code::W011 => "W011",
            Code::N001 => "N001",
            Code::N002 => "N002",
        }
    }

    pub fn is_integrity(self) -> bool {
        self.as_str().starts_with('E')
    }

    pub fn is_note(self) -> bool {
        self.as_str().starts_with('N')
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown diagnostic code `{0}`")]
pub struct UnknownCode(pub String);

impl FromStr for Code {
    type Err = UnknownCode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let all = [
            Code::E001,
            Code::E002,
            Code::E003,
            Code::E004,
            Code::E005,
            Code::E006,
            Code::E007,
            Code::E008,
            Code::E009,
            Code::E010,
            Code::N001,
            Code::N002,
        ];
        all.into_iter()
            .chain(Code::RULES)
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownCode(s.to_string()))
    }
}

impl Serialize for Code {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
    Note,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => f.write_str("error"),
            Severity::Warning => f.write_str("warning"),
            Severity::Note => f.write_str("note"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub code: Code,
    pub severity: Severity,
    pub subject: String,
    pub message: String,
    pub related: Vec<String>,
}

impl Diagnostic {
    pub fn new(code: Code, subject: impl Into<String>, message: impl Into<String>) -> Self {
        let severity = if code.is_note() {
            Severity::Note
        } else {
            Severity::Error
        };
        Diagnostic {
            code,
            severity,
            subject: subject.into(),
            message: message.into(),
            related: Vec::new(),
        }
    }

    pub fn with_related(mut self, related: impl IntoIterator<Item = String>) -> Self {
        self.related.extend(related);
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}[{}] {}: {}",
            self.severity, self.code, self.subject, self.message
        )?;
        if !self.related.is_empty() {
            write!(f, " (related: {})", self.related.join(", "))?;
        }
        Ok(())
    }
}

/// Orders diagnostics by subject path, then code, then message.
pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by(|a, b| {
        (&a.subject, a.code, &a.message).cmp(&(&b.subject, b.code, &b.message))
    });
}

/// Renders a set of interface names as `{A, B}`.
pub fn fmt_set<'a>(items: impl IntoIterator<Item = &'a str>) -> String {
    let items: Vec<&str> = items.into_iter().collect();
    format!("{{{}}}", items.join(", "))
}
