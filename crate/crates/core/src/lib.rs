//! Verification toolkit for privacy architectures.
//!
//! An architecture describes which component may hold, receive, compute, check, verify or
//! spot-check which variables and properties, and whom it trusts. This crate parses
//! architectures from the `.parch` format ([`dsl`]), checks their well-formedness
//! ([`consistency`]), proves data-minimisation and integrity goals with an inference system
//! ([`prover`]), and cross-validates those proofs against a bounded enumeration of compatible
//! traces ([`semantics`], [`oracle`]).

pub mod model;
pub mod oracle;
pub use model::*;
pub mod consistency;
pub mod dsl;
pub mod gen;
pub mod prover;
pub mod semantics;
