//! Textual `.parch` syntax: lexer, parser and pretty-printer.
//!
//! A bundle holds one architecture, an optional `model` (function interpretations and
//! enumeration bounds) and a list of goals. See `docs/grammar.ebnf` for the full grammar.

mod diag;
mod lexer;
mod parser;
mod printer;
mod validate;

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Architecture, Formula, Model};

pub use diag::{DiagKind, Severity, SourceDiagnostic, Span};
pub use parser::{parse_bundle_with_warnings, parse_equation};
pub use printer::pretty_print;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bundle {
    pub architecture: Architecture,
    pub model: Option<Model>,
    pub goals: Vec<Formula>,
}

/// Parses a bundle. Warnings are dropped; use [`parse_bundle_with_warnings`] to keep them.
pub fn parse_bundle(src: &str) -> Result<Bundle, Vec<SourceDiagnostic>> {
    parse_bundle_with_warnings(src).map(|(b, _)| b)
}

/// Parses `src` as the body of a `goals` block over `a`. Spans refer to `src`.
pub fn parse_goals(a: &Architecture, src: &str) -> Result<Vec<Formula>, Vec<SourceDiagnostic>> {
    let printed = pretty_print(&Bundle { architecture: a.clone(), model: None, goals: vec![] });
    let offset = printed.lines().count() + 1;
    parse_bundle(&format!("{printed}goals {{\n{src}\n}}\n")).map(|b| b.goals).map_err(|ds| {
        ds.into_iter()
            .map(|mut d| {
                d.span.line = d.span.line.saturating_sub(offset);
                d.span.end_line = d.span.end_line.saturating_sub(offset);
                d
            })
            .collect()
    })
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{} error(s) while parsing {path}", .diagnostics.len())]
    Parse { path: String, diagnostics: Vec<SourceDiagnostic> },
}

pub fn load_bundle(path: impl AsRef<Path>) -> Result<Bundle, LoadError> {
    let p = path.as_ref();
    let text = std::fs::read_to_string(p).map_err(|source| LoadError::Io { path: p.display().to_string(), source })?;
    parse_bundle(&text).map_err(|diagnostics| LoadError::Parse { path: p.display().to_string(), diagnostics })
}

/// The bundled smart-metering example.
pub const SMART_METERING: &str = include_str!("../../examples/smart_metering.parch");
/// One-element sampling of the meter's computation by the provider.
pub const SPOTCHECK: &str = include_str!("../../examples/spotcheck.parch");
pub const HASH_INJECTIVITY: &str = include_str!("../../examples/hash_injectivity.parch");

/// Every bundled example as `(file name, source)`.
pub const EXAMPLES: [(&str, &str); 3] = [
    ("smart_metering.parch", SMART_METERING),
    ("spotcheck.parch", SPOTCHECK),
    ("hash_injectivity.parch", HASH_INJECTIVITY),
];

#[cfg(test)]
mod tests;
