//! Syntactic and semantic domain types shared by every other module.

mod arch;
mod eval;
mod formula;
mod interp;
mod term;

pub use arch::*;
pub use eval::*;
pub use formula::Formula;
pub use interp::*;
pub use term::*;
