//! `trapdoor features` — feature extraction for the classifier stack.

use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use serde_json::json;

use trapdoor_core::corpus::{read_events, CorpusError};
use trapdoor_core::events::EventRecord;
use trapdoor_core::mlkit::{disassemble, exchange_features, opcode_features};
use trapdoor_core::types::Address;

use super::{print_json, read_required, Status};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FeatureMode {
    /// Opcode term frequencies from disassembled runtime bytecode.
    Opcode,
    /// Behavioral features from token and pool event streams.
    Exchange,
}

#[derive(Args, Debug)]
pub struct FeaturesArgs {
    #[arg(long, value_enum)]
    pub mode: FeatureMode,

    /// Opcode mode: file holding hex-encoded runtime bytecode.
    #[arg(long, required_if_eq("mode", "opcode"))]
    pub bytecode: Option<PathBuf>,

    /// Exchange mode: token-side event stream (JSON lines).
    #[arg(long, required_if_eq("mode", "exchange"))]
    pub token_events: Option<PathBuf>,

    /// Exchange mode: pool-side event stream (JSON lines).
    #[arg(long, required_if_eq("mode", "exchange"))]
    pub pool_events: Option<PathBuf>,

    /// Exchange mode: the token under analysis.
    #[arg(long, required_if_eq("mode", "exchange"))]
    pub token: Option<String>,

    /// Exchange mode: the token's creator address.
    #[arg(long, required_if_eq("mode", "exchange"))]
    pub creator: Option<String>,

    /// Exchange mode: the pool the token trades in.
    #[arg(long, required_if_eq("mode", "exchange"))]
    pub pool: Option<String>,
}

pub fn run(args: &FeaturesArgs) -> Result<Status> {
    match args.mode {
        FeatureMode::Opcode => run_opcode(args.bytecode.as_deref().expect("required by clap")),
        FeatureMode::Exchange => run_exchange(args),
    }
}

fn run_opcode(path: &Path) -> Result<Status> {
    let hex = read_required(path)?;
    match disassemble(hex.trim()) {
        Ok(ops) => {
            let vector = opcode_features(&ops);
            print_json(&vector)?;
            Ok(Status::Clean)
        }
        Err(err) => {
            eprintln!("{}: bytecode rejected: {err}", path.display());
            Ok(Status::Partial)
        }
    }
}

fn run_exchange(args: &FeaturesArgs) -> Result<Status> {
    let token_events = match load_events(args.token_events.as_deref().expect("required by clap"))? {
        Some(events) => events,
        None => return Ok(Status::Partial),
    };
    let pool_events = match load_events(args.pool_events.as_deref().expect("required by clap"))? {
        Some(events) => events,
        None => return Ok(Status::Partial),
    };
    let token = Address::new(args.token.clone().expect("required by clap"));
    let creator = Address::new(args.creator.clone().expect("required by clap"));
    let pool = Address::new(args.pool.clone().expect("required by clap"));

    match exchange_features(&token_events, &pool_events, &token, &creator, &pool) {
        Ok(features) => {
            print_json(&json!({ "token_id": token, "features": features }))?;
            Ok(Status::Clean)
        }
        Err(err) => {
            eprintln!("{token}: feature extraction failed: {err}");
            Ok(Status::Partial)
        }
    }
}

/// `Ok(None)` marks content-level trouble (handled as a per-token failure);
/// a missing or unreadable file is an invocation error.
fn load_events(path: &Path) -> Result<Option<Vec<EventRecord>>> {
    match read_events(path) {
        Ok(events) => Ok(Some(events)),
        Err(CorpusError::Io { detail }) => {
            bail!("cannot read {}: {detail}", path.display())
        }
        Err(err) => {
            eprintln!("{}: event stream rejected: {err}", path.display());
            Ok(None)
        }
    }
}
