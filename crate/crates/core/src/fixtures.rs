//! Reference models shipped with the crate for tests and the FFI smoke tests.

use crate::ingest::parse_dsl_named;
use crate::model::Model;

pub const DELEGATION: &str = include_str!("../fixtures/delegation.csm");
pub const MIXED_ACTIVITY: &str = include_str!("../fixtures/mixed_activity.csm");
pub const SHARED_PORT: &str = include_str!("../fixtures/shared_port.csm");
pub const SPLIT_PORTS: &str = include_str!("../fixtures/split_ports.csm");
pub const ATM: &str = include_str!("../fixtures/atm.csm");
pub const LEAF: &str = include_str!("../fixtures/leaf.csm");
pub const ATM_JSON: &str = include_str!("../fixtures/atm.csm.json");

/// Parses DSL source that is known to be valid.
///
/// # Panics
/// On any parse error.
pub fn parse(src: &str) -> Model {
    match parse_dsl_named(src, "<fixture>") {
        Ok(m) => m,
        Err(errs) => {
            let msgs: Vec<String> = errs.iter().map(ToString::to_string).collect();
            panic!("fixture does not parse:\n{}", msgs.join("\n"))
        }
    }
}

/// Composite `A` with parts `d: D`, `e: E` and the delegation links around `pIJL` and `rK`.
pub fn delegation() -> Model {
    parse(DELEGATION)
}

/// Active composite mixing active and passive parts.
pub fn mixed_activity() -> Model {
    parse(MIXED_ACTIVITY)
}

pub fn shared_port() -> Model {
    parse(SHARED_PORT)
}

pub fn split_ports() -> Model {
    parse(SPLIT_PORTS)
}

pub fn atm() -> Model {
    parse(ATM)
}

/// The ATM model read from its JSON form.
pub fn atm_json() -> Model {
    crate::ingest::parse_json_named(ATM_JSON, "atm.csm.json").expect("fixture parses")
}

pub fn leaf() -> Model {
    parse(LEAF)
}

/// Every shipped fixture that passes all rules, by name.
pub fn well_formed() -> Vec<(&'static str, Model)> {
    vec![
        ("delegation", delegation()),
        ("split_ports", split_ports()),
        ("atm", atm()),
        ("leaf", leaf()),
    ]
}
