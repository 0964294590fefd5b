//! Subcommand implementations and the shared exit-status plumbing.
//!
//! Each `run` returns `Ok(Status)` when the invocation was valid — even if
//! individual tokens failed — and `Err` only for invocation-level problems
//! (unreadable or malformed batch inputs), which the caller maps to exit
//! code 2.

pub mod evaluate;
pub mod features;
pub mod label;
pub mod probe;
pub mod report;
pub mod scan;
pub mod synth;
pub mod train;

use anyhow::{Context, Result};
use std::path::Path;

use trapdoor_core::types::Ratio;

/// How a valid invocation ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// Every token processed; exit 0.
    Clean,
    /// The run finished but some tokens failed; exit 1.
    Partial,
}

/// Read a file the invocation names directly; failure is an invocation
/// error (exit 2), not a per-token one.
pub(crate) fn read_required(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Pretty-print a JSON document to stdout.
pub(crate) fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

/// Parse a fee fraction like `0.30`, validated to `[0, 1)`.
pub(crate) fn parse_fraction(s: &str) -> std::result::Result<f64, String> {
    let value: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !(0.0..1.0).contains(&value) {
        return Err("fee fraction must be at least 0 and below 1".into());
    }
    Ok(value)
}

/// Convert a validated fee fraction to an exact rational at basis-point
/// resolution (0.30 → 3000/10000).
pub(crate) fn fraction_to_ratio(fraction: f64) -> Ratio {
    Ratio::from_bps((fraction * 10_000.0).round() as u32)
}
