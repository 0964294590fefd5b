//! `trapdoor probe` — run the dynamic buy/approve/sell sequence against a
//! freshly deployed token.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use serde_json::json;

use trapdoor_core::corpus::pool_address;
use trapdoor_core::probe::{run_probe, ProbeConfig};
use trapdoor_core::tokenvm::{TokenInstance, TokenSpec};
use trapdoor_core::types::Address;

use super::{fraction_to_ratio, parse_fraction, print_json, read_required, Status};

#[derive(Args, Debug)]
pub struct ProbeArgs {
    /// Path to a token spec (JSON).
    #[arg(long)]
    pub token: PathBuf,

    /// Pool to trade against; defaults to the token's standard pool address.
    #[arg(long)]
    pub pool: Option<String>,

    /// Acceptable sell-fee threshold as a fraction (basis-point resolution).
    #[arg(long, default_value_t = 0.30, value_parser = parse_fraction)]
    pub acc_fee: f64,
}

pub fn run(args: &ProbeArgs) -> Result<Status> {
    let text = read_required(&args.token)?;
    let spec: TokenSpec = serde_json::from_str(&text)
        .with_context(|| format!("{} is not a token spec", args.token.display()))?;

    let mut token = TokenInstance::deploy(spec);
    let pool = args
        .pool
        .clone()
        .map(Address::new)
        .unwrap_or_else(|| pool_address(&token.spec.id));

    // Probes run against a fresh deployment, so the deployer seeds the pool
    // with half the supply first — the same harness the batch pipeline uses.
    let owner = token.spec.owner.clone();
    let liquidity = (token.spec.total_supply / 2).max(1);
    if let Err(err) = token.transfer(&owner, &pool, liquidity, &pool) {
        eprintln!("warning: pool seeding failed: {err:?}");
    }

    let config = ProbeConfig::with_acc_fee(fraction_to_ratio(args.acc_fee));
    match run_probe(&token, Some(&pool), &config) {
        Ok(outcome) => {
            print_json(&json!({
                "token_id": token.spec.id,
                "pool": pool,
                "clean_pass": outcome.clean_pass(),
                "outcome": outcome,
            }))?;
            Ok(Status::Clean)
        }
        Err(err) => {
            eprintln!("{}: probe failed: {err}", token.spec.id);
            Ok(Status::Partial)
        }
    }
}
