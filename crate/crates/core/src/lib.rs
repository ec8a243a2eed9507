//! Transform deterministic pushdown automata into equivalent ones that are
//! accessible, free of deadlocks and lifelocks, and operationally blockfree.
//!
//! The transformation runs through twelve steps: the automaton is made
//! simple ([`epda::to_sdpda`]), double marking is removed
//! ([`epda::remove_double_marking`]), a grammar is built and trimmed
//! ([`cfg::sdpda_to_cfg`], [`cfg::trim`]), an LR(1) parser is constructed
//! ([`lr::build_lr_machine`], [`lr::build_parser`]) and converted back into an
//! automaton ([`parser`], [`epda::edpda_to_dpda`]), and finally inaccessible
//! edges are dropped ([`reach::enforce_accessibility`]). [`pipeline::run_pipeline`]
//! runs all of it; [`oracle`] checks the result by bounded exploration.

pub mod ats;
pub mod cfg;
pub mod corpus;
pub mod epda;
pub mod error;
pub mod io;
pub mod lr;
pub mod oracle;
pub mod parser;
pub mod pipeline;
pub mod reach;
mod util;

pub use ats::{Ats, Budget, BoundedLanguage, Derivation, Language, Sym, Word};
pub use cfg::Cfg;
pub use epda::Epda;
pub use error::{Error, Result};
pub use lr::LrMachine;
pub use parser::LrParser;
