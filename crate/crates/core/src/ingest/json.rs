//! JSON interchange format (`"formatVersion": 1`).

use serde::{Deserialize, Serialize};

use crate::ingest::ParseError;
use crate::model::{
    Association, AssociationEnd, Attribute, Class, ClassKind, Connector, EndRef, Interface,
    Model, Part, Port, SourceSpan, Span, FORMAT_VERSION,
};

fn is_false(b: &bool) -> bool {
    !*b
}

fn one() -> u32 {
    1
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct ModelDoc {
    format_version: u32,
    #[serde(default)]
    interfaces: Vec<InterfaceDoc>,
    #[serde(default)]
    classes: Vec<ClassDoc>,
    #[serde(default)]
    associations: Vec<AssociationDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    root: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct InterfaceDoc {
    name: String,
    #[serde(default)]
    generals: Vec<String>,
    #[serde(default)]
    is_interface_group: bool,
    #[serde(default)]
    operations: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct ClassDoc {
    name: String,
    #[serde(default)]
    kind: ClassKind,
    #[serde(default)]
    generals: Vec<String>,
    #[serde(default)]
    realizes: Vec<String>,
    #[serde(default)]
    uses: Vec<String>,
    #[serde(default)]
    attributes: Vec<AttributeDoc>,
    #[serde(default)]
    parts: Vec<PartDoc>,
    #[serde(default)]
    ports: Vec<PortDoc>,
    #[serde(default)]
    connectors: Vec<ConnectorDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AttributeDoc {
    name: String,
    #[serde(rename = "type")]
    ty: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartDoc {
    name: String,
    #[serde(rename = "type")]
    ty: String,
    #[serde(default = "one")]
    multiplicity: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PortDoc {
    name: String,
    contract: String,
    #[serde(default)]
    reversed: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConnectorDoc {
    end1: EndRef,
    end2: EndRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    association: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AssociationDoc {
    name: String,
    end1: AssociationEnd,
    end2: AssociationEnd,
    #[serde(default, skip_serializing_if = "is_false")]
    synthesized: bool,
}

/// Canonical JSON for `model`: fixed field order, two-space indentation,
/// trailing newline. The same model always yields the same bytes.
pub fn serialize_json(model: &Model) -> String {
    let doc = ModelDoc {
        format_version: FORMAT_VERSION,
        interfaces: model
            .interfaces
            .iter()
            .map(|i| InterfaceDoc {
                name: i.name.clone(),
                generals: i.generals.clone(),
                is_interface_group: i.is_group,
                operations: i.operations.clone(),
            })
            .collect(),
        classes: model
            .classes
            .iter()
            .map(|c| ClassDoc {
                name: c.name.clone(),
                kind: c.kind,
                generals: c.generals.clone(),
                realizes: c.realizes.clone(),
                uses: c.uses.clone(),
                attributes: c
                    .attributes
                    .iter()
                    .map(|a| AttributeDoc {
                        name: a.name.clone(),
                        ty: a.ty.clone(),
                    })
                    .collect(),
                parts: c
                    .parts
                    .iter()
                    .map(|p| PartDoc {
                        name: p.name.clone(),
                        ty: p.ty.clone(),
                        multiplicity: p.multiplicity,
                    })
                    .collect(),
                ports: c
                    .ports
                    .iter()
                    .map(|p| PortDoc {
                        name: p.name.clone(),
                        contract: p.contract.clone(),
                        reversed: p.reversed,
                    })
                    .collect(),
                connectors: c
                    .connectors
                    .iter()
                    .map(|k| ConnectorDoc {
                        end1: k.end1.clone(),
                        end2: k.end2.clone(),
                        association: k.association.clone(),
                    })
                    .collect(),
            })
            .collect(),
        associations: model
            .associations
            .iter()
            .map(|a| AssociationDoc {
                name: a.name.clone(),
                end1: a.end1.clone(),
                end2: a.end2.clone(),
                synthesized: a.synthesized,
            })
            .collect(),
        root: model.root.clone(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("model serializes");
    s.push('\n');
    s
}

pub fn parse_json(text: &str) -> Result<Model, Vec<ParseError>> {
    parse_json_named(text, "<input>")
}

pub fn parse_json_named(text: &str, file: &str) -> Result<Model, Vec<ParseError>> {
    let doc: ModelDoc = serde_json::from_str(text).map_err(|e| {
        vec![ParseError {
            span: SourceSpan {
                file: file.to_string(),
                line: e.line().max(1) as u32,
                column: e.column().max(1) as u32,
            },
            message: e.to_string(),
            expected: None,
        }]
    })?;
    if doc.format_version != FORMAT_VERSION {
        return Err(vec![ParseError {
            span: SourceSpan {
                file: file.to_string(),
                line: 1,
                column: 1,
            },
            message: format!("unsupported formatVersion {}", doc.format_version),
            expected: Some(format!("formatVersion {FORMAT_VERSION}")),
        }]);
    }
    Ok(Model {
        interfaces: doc
            .interfaces
            .into_iter()
            .map(|i| Interface {
                name: i.name,
                generals: i.generals,
                is_group: i.is_interface_group,
                operations: i.operations,
                span: Span::none(),
            })
            .collect(),
        classes: doc
            .classes
            .into_iter()
            .map(|c| Class {
                name: c.name,
                kind: c.kind,
                generals: c.generals,
                realizes: c.realizes,
                uses: c.uses,
                attributes: c
                    .attributes
                    .into_iter()
                    .map(|a| Attribute {
                        name: a.name,
                        ty: a.ty,
                        span: Span::none(),
                    })
                    .collect(),
                parts: c
                    .parts
                    .into_iter()
                    .map(|p| Part {
                        name: p.name,
                        ty: p.ty,
                        multiplicity: p.multiplicity,
                        span: Span::none(),
                    })
                    .collect(),
                ports: c
                    .ports
                    .into_iter()
                    .map(|p| Port {
                        name: p.name,
                        contract: p.contract,
                        reversed: p.reversed,
                        span: Span::none(),
                    })
                    .collect(),
                connectors: c
                    .connectors
                    .into_iter()
                    .map(|k| Connector {
                        end1: k.end1,
                        end2: k.end2,
                        association: k.association,
                        span: Span::none(),
                    })
                    .collect(),
                span: Span::none(),
            })
            .collect(),
        associations: doc
            .associations
            .into_iter()
            .map(|a| Association {
                name: a.name,
                end1: a.end1,
                end2: a.end2,
                synthesized: a.synthesized,
                span: Span::none(),
            })
            .collect(),
        root: doc.root,
    })
}
