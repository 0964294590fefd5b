//! `trapdoor report` — exchange analytics over a token catalog: lifetime
//! histogram, bytecode clone groups, high-value impersonation matches, and
//! scammer profit.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use serde_json::json;

use trapdoor_core::corpus::{
    clone_groups, code_digest, fake_token_matches, lifetime, profit_usd, read_events,
    read_token_records, CloneItem, HighValueToken, DEFAULT_MONTH_BLOCKS,
};
use trapdoor_core::types::Address;

use super::{print_json, read_required, Status};

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Token catalog (JSON lines of token records); artifact paths resolve
    /// relative to this file.
    #[arg(long)]
    pub records: PathBuf,

    /// High-value token list (JSON array) impersonation is checked against.
    #[arg(long)]
    pub high_value: Option<PathBuf>,

    /// USD prices per paired token (JSON object, address → price); omit to
    /// skip the profit analytics.
    #[arg(long)]
    pub prices: Option<PathBuf>,

    /// Blocks per "month" for the lifetime histogram's buckets.
    #[arg(long, default_value_t = DEFAULT_MONTH_BLOCKS)]
    pub month_blocks: u64,
}

pub fn run(args: &ReportArgs) -> Result<Status> {
    let records = read_token_records(&args.records)
        .with_context(|| format!("cannot read {}", args.records.display()))?;
    let base = args.records.parent().unwrap_or_else(|| Path::new("."));

    let high_value: Vec<HighValueToken> = match &args.high_value {
        Some(path) => serde_json::from_str(&read_required(path)?)
            .with_context(|| format!("{} is not a high-value token list", path.display()))?,
        None => Vec::new(),
    };
    let prices: BTreeMap<Address, f64> = match &args.prices {
        Some(path) => serde_json::from_str(&read_required(path)?)
            .with_context(|| format!("{} is not a price table", path.display()))?,
        None => BTreeMap::new(),
    };

    let mut failures: Vec<(Address, String)> = Vec::new();
    let mut lifetimes = Vec::new();
    let mut clone_items = Vec::new();
    let mut profits: BTreeMap<Address, f64> = BTreeMap::new();
    let mut with_events = 0usize;

    for record in &records {
        if let Some(relative) = &record.paths.bytecode {
            match fs::read(base.join(relative)) {
                Ok(bytes) => clone_items.push(CloneItem {
                    token_id: record.token_id.clone(),
                    creator: record.creator.clone(),
                    digest: code_digest(&bytes),
                }),
                Err(err) => failures.push((record.token_id.clone(), format!("bytecode: {err}"))),
            }
        }

        if let Some(relative) = &record.paths.events {
            match read_events(&base.join(relative)) {
                Ok(events) => {
                    with_events += 1;
                    lifetimes.push(lifetime(&events, record.creation_block));
                    if !prices.is_empty() {
                        match profit_usd(&events, &record.token_id, &prices) {
                            Ok(usd) => {
                                profits.insert(record.token_id.clone(), usd);
                            }
                            Err(err) => {
                                failures.push((record.token_id.clone(), err.to_string()));
                            }
                        }
                    }
                }
                Err(err) => failures.push((record.token_id.clone(), format!("events: {err}"))),
            }
        }
    }

    let groups = clone_groups(&clone_items);
    let identities: Vec<(Address, String, String)> = records
        .iter()
        .map(|r| (r.token_id.clone(), r.name.clone(), r.symbol.clone()))
        .collect();
    let fakes = fake_token_matches(&identities, &high_value);
    let total_profit: f64 = profits.values().sum();

    for (token_id, note) in &failures {
        eprintln!("warning: {token_id}: {note}");
    }

    print_json(&json!({
        "tokens": records.len(),
        "with_events": with_events,
        "lifetime_histogram": histogram(&lifetimes, args.month_blocks),
        "clone_groups": {
            "total": groups.len(),
            "multi_member": groups.iter().filter(|g| g.size() > 1).count(),
            "groups": groups,
        },
        "fake_matches": fakes,
        "profit_usd": {
            "per_token": profits,
            "total": total_profit,
        },
        "failures": failures
            .iter()
            .map(|(token_id, note)| json!({ "token_id": token_id, "note": note }))
            .collect::<Vec<_>>(),
    }))?;

    if failures.is_empty() {
        Ok(Status::Clean)
    } else {
        Ok(Status::Partial)
    }
}

/// Bucket lifetimes against day/week/month marks derived from the block
/// count that stands in for one month.
fn histogram(lifetimes: &[u64], month_blocks: u64) -> Vec<serde_json::Value> {
    let day = month_blocks / 30;
    let week = day * 7;
    let mut counts = [0usize; 5];
    for &blocks in lifetimes {
        let bucket = if blocks == 0 {
            0
        } else if blocks <= day {
            1
        } else if blocks <= week {
            2
        } else if blocks <= month_blocks {
            3
        } else {
            4
        };
        counts[bucket] += 1;
    }
    let labels = [
        "no_trades".to_string(),
        format!("within_one_day (<= {day} blocks)"),
        format!("within_one_week (<= {week} blocks)"),
        format!("within_one_month (<= {month_blocks} blocks)"),
        "beyond_one_month".to_string(),
    ];
    labels
        .iter()
        .zip(counts)
        .map(|(label, count)| json!({ "bucket": label, "count": count }))
        .collect()
}
