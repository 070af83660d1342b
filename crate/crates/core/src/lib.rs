//! Well-formedness checking and request-routing simulation for hierarchical
//! component models.
//!
//! The usual pipeline is [`ingest::load`] or [`ingest::parse_str`], then
//! [`integrity::validate_integrity`], [`integrity::synthesize_deleg_associations`]
//! and finally [`rules::check_model`] or [`sim::instantiate`].

pub mod cli;
pub mod diagnostic;
pub mod fixtures;
pub mod ingest;
pub mod integrity;
pub mod model;
pub mod rules;
pub mod sim;
pub mod types;

pub use diagnostic::{Code, Diagnostic, Severity};
pub use model::Model;
pub use rules::{check_model, check_model_with, CheckOptions, CheckReport};
pub use types::TypeSystem;
