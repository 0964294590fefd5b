//! Static trap analysis over contract source trees.
//!
//! The pipeline mirrors how an auditor reads a token contract:
//!
//! 1. [`parse_ast`] validates the JSON source tree and indexes it;
//! 2. [`summarize`] reduces it to the semantic buckets — typed state
//!    variables, the transfer slice, transfer inputs with their dependant
//!    closures, end nodes, caller-guarded functions, low-level calls, and
//!    the call graph;
//! 3. [`detect_indicators`] runs the five category rules over the summary;
//! 4. [`find_cycles`] exposes the call-graph cycle search used by the
//!    invalid-callback rule.
//!
//! Detection is purely structural: renaming variables, functions, or
//! modifiers changes reported identifiers but never which indicators fire.

mod detect;
mod graph;
mod parse;
mod summary;

pub use detect::{detect_indicators, Evidence, Indicator, Mutability};
pub use graph::find_cycles;
pub use parse::{parse_ast, AstError, Contract, ContractAst, Node, NodeKind, TypeTag, Visibility};
pub use summary::{summarize, SemanticSummary};
