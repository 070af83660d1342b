//! Front ends: the `.csm` text DSL and the `.csm.json` interchange format.

mod dsl;
mod json;

use std::fmt;
use std::path::Path;

pub use dsl::{parse_dsl, parse_dsl_named};
pub use json::{parse_json, parse_json_named, serialize_json};

use crate::model::{Model, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Option<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)?;
        if let Some(e) = &self.expected {
            write!(f, " (expected {e})")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Auto,
    Dsl,
    Json,
}

impl Format {
    /// `.csm.json` and `.json` are JSON, everything else is DSL.
    pub fn detect(path: &Path) -> Format {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().to_ascii_lowercase())
            .unwrap_or_default();
        if name.ends_with(".json") {
            Format::Json
        } else {
            Format::Dsl
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{} parse error(s)", .0.len())]
    Parse(Vec<ParseError>),
}

/// Parses `text` in the given format; `Auto` picks by the file name.
pub fn parse_str(text: &str, file: &str, format: Format) -> Result<Model, Vec<ParseError>> {
    let format = match format {
        Format::Auto => Format::detect(Path::new(file)),
        f => f,
    };
    match format {
        Format::Json => parse_json_named(text, file),
        _ => parse_dsl_named(text, file),
    }
}

pub fn load(path: &Path, format: Format) -> Result<Model, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_str(&text, &path.display().to_string(), format).map_err(LoadError::Parse)
}
