//! Research lab for "trapdoor" scam tokens: ERC-20 contracts that let anyone
//! buy on a constant-product exchange but quietly prevent profitable selling.
//!
//! The crate is organized around one synthetic ground truth that drives three
//! independent analyses:
//!
//! * [`amm`] — an integer-math constant-product pool (UniswapV2-style pricing).
//! * [`tokenvm`] — an executable token machine whose transfer path can carry
//!   the five trap families (permission, suspension, amount limit, fee
//!   manipulation, invalid callback), plus a corpus synthesizer that emits a
//!   paired contract AST and bytecode stub for every generated token.
//! * [`probe`] — the dynamic buy-and-sell test run against a cloned token.
//! * [`semantic`] — static detection over a compact contract AST: summary
//!   sets, dependant closures, call-graph cycles, and the five indicator
//!   checks.
//! * [`mlkit`] — bytecode disassembly, opcode/exchange feature extraction,
//!   borderline SMOTE, and small from-scratch classifiers with a
//!   cross-validated training protocol.
//! * [`corpus`] — record types, the suspicious-token filter, probe-vs-static
//!   label crosschecking, portfolio analytics, and the end-to-end pipeline.

pub mod amm;
pub mod corpus;
pub mod events;
pub mod mlkit;
pub mod probe;
pub mod semantic;
pub mod tokenvm;
pub mod types;
