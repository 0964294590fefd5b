//! `trapdoor scan` — static semantic analysis of one contract AST.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use serde_json::json;

use trapdoor_core::semantic::{detect_indicators, parse_ast, summarize};

use super::{print_json, read_required, Status};

#[derive(Args, Debug)]
pub struct ScanArgs {
    /// Path to a contract AST document (JSON).
    #[arg(long)]
    pub ast: PathBuf,
}

pub fn run(args: &ScanArgs) -> Result<Status> {
    let text = read_required(&args.ast)?;
    // A file the flag names but that is not a valid AST is a failure of
    // the scanned artifact, not of the invocation.
    let ast = match parse_ast(&text) {
        Ok(ast) => ast,
        Err(err) => {
            eprintln!("{}: ast rejected: {err}", args.ast.display());
            return Ok(Status::Partial);
        }
    };
    let summary = summarize(&ast);
    let indicators = detect_indicators(&ast, &summary);
    print_json(&json!({
        "indicator_count": indicators.len(),
        "indicators": indicators,
    }))?;
    Ok(Status::Clean)
}
