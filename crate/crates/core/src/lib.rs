//! Assembling whole programs from per-line candidate code pieces under
//! syntactic and symbol-table constraints.

pub mod eval;
pub mod ingest;
pub mod pe_parser;
pub mod scaffold;
pub mod search;
pub mod synth;

pub use ingest::{CodePiece, Problem, Program, PseudoLine};
pub use scaffold::{Configuration, Regime, ScaffoldState, Violation, ViolationKind};
