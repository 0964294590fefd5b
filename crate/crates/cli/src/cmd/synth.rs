//! `trapdoor synth` — corpus generation with on-disk fixtures.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{Context, Result};
use clap::Args;
use serde_json::json;

use trapdoor_core::corpus::{
    simulate_history, write_events, write_manifest, write_token_records, FixturePaths,
    HighValueToken, ManifestEntry, PoolLink, ScenarioConfig, TokenHistory, TokenRecord,
    DEFAULT_MONTH_BLOCKS,
};
use trapdoor_core::events::EventRecord;
use trapdoor_core::tokenvm::{synthesize_mixed_corpus, Category, WELL_KNOWN_TOKENS};
use trapdoor_core::types::Address;

use super::Status;

/// Per-category armed-token counts, parsed from `EP=20,ES=20,...`.
#[derive(Clone, Debug)]
pub struct CategoryCounts(pub BTreeMap<Category, usize>);

impl FromStr for CategoryCounts {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let mut counts = BTreeMap::new();
        for part in s.split(',').filter(|p| !p.trim().is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("`{part}` is not KEY=COUNT"))?;
            let key = key.trim();
            let category = Category::from_short(key).ok_or_else(|| {
                format!("unknown category `{key}` (expected one of EP, ES, AL, FM, IC)")
            })?;
            let count: usize = value
                .trim()
                .parse()
                .map_err(|_| format!("`{}` is not a count", value.trim()))?;
            if counts.insert(category, count).is_some() {
                return Err(format!("category `{key}` given twice"));
            }
        }
        Ok(CategoryCounts(counts))
    }
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Directory the manifest and fixtures are written into.
    #[arg(long)]
    pub out: PathBuf,

    /// RNG seed; equal seeds and counts give byte-identical corpora.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Armed tokens per trap category, e.g. `EP=100,ES=50`; omitted
    /// categories get none.
    #[arg(long, default_value = "EP=20,ES=20,AL=20,FM=20,IC=20")]
    pub counts: CategoryCounts,

    /// Number of benign tokens appended after the armed ones.
    #[arg(long, default_value_t = 100)]
    pub benign: usize,

    /// Also simulate per-token exchange histories, writing token records,
    /// event streams, and the high-value/price fixtures `report` consumes.
    #[arg(long)]
    pub histories: bool,
}

pub fn run(args: &SynthArgs) -> Result<Status> {
    let corpus = synthesize_mixed_corpus(args.seed, &args.counts.0, args.benign);

    fs::create_dir_all(args.out.join("ast"))
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    fs::create_dir_all(args.out.join("bytecode"))?;
    if args.histories {
        fs::create_dir_all(args.out.join("events"))?;
    }

    let paired = Address::new("0xweth");
    let mut entries = Vec::with_capacity(corpus.len());
    let mut records = Vec::new();

    for (idx, token) in corpus.iter().enumerate() {
        let id = token.spec.id.as_str();
        let ast_rel = format!("ast/{id}.json");
        let bytecode_rel = format!("bytecode/{id}.hex");
        fs::write(args.out.join(&ast_rel), token.fixtures.ast.to_string())?;
        fs::write(args.out.join(&bytecode_rel), &token.fixtures.bytecode_hex)?;

        let mut paths = FixturePaths {
            ast: Some(ast_rel),
            bytecode: Some(bytecode_rel),
            events: None,
        };

        if args.histories {
            let creation_block = 1_000_000 + (idx as u64) * 1_000;
            let armed = !token.categories.is_empty();
            // Armed tokens get rugged at the one-month mark; benign ones
            // trade out a longer listing and keep their liquidity.
            let listed = if armed {
                DEFAULT_MONTH_BLOCKS
            } else {
                3 * DEFAULT_MONTH_BLOCKS
            };
            let mut scenario = ScenarioConfig::standard(paired.clone(), creation_block, listed);
            scenario.rug = armed;
            let history_seed = args.seed ^ (idx as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
            let history = simulate_history(&token.spec, &scenario, history_seed);

            let events_rel = format!("events/{id}.jsonl");
            write_events(&args.out.join(&events_rel), &merged_events(&history))?;
            paths.events = Some(events_rel);

            records.push(TokenRecord {
                token_id: token.spec.id.clone(),
                name: token.spec.name.clone(),
                symbol: token.spec.symbol.clone(),
                creator: token.spec.owner.clone(),
                creation_block,
                has_source: true,
                paths: paths.clone(),
                pools: vec![PoolLink {
                    pool_id: history.pool_id.clone(),
                    paired_token: paired.clone(),
                }],
            });
        }

        entries.push(ManifestEntry {
            spec: token.spec.clone(),
            categories: token.categories.clone(),
            paths,
        });
    }

    write_manifest(&args.out.join("manifest.jsonl"), &entries)?;
    if args.histories {
        write_token_records(&args.out.join("records.jsonl"), &records)?;
        write_market_fixtures(args, &paired)?;
    }

    let armed_total: usize = args.counts.0.values().sum();
    print_summary(args, armed_total)?;
    Ok(Status::Clean)
}

/// Token and pool event streams share one monotone log counter, so a plain
/// (block, log_index) sort yields a single strictly ordered stream.
fn merged_events(history: &TokenHistory) -> Vec<EventRecord> {
    let mut all: Vec<EventRecord> = history
        .token_events
        .iter()
        .chain(&history.pool_events)
        .cloned()
        .collect();
    all.sort_by_key(|e| (e.block, e.log_index));
    all
}

/// High-value identities and paired-token prices for the `report`
/// impersonation and profit analytics. The pool pairing above uses
/// `0xweth`, so that entry carries the matching id.
fn write_market_fixtures(args: &SynthArgs, paired: &Address) -> Result<()> {
    let mut high_value = Vec::new();
    for (i, (name, symbol)) in WELL_KNOWN_TOKENS.iter().enumerate() {
        let token_id = if *symbol == "WETH" {
            paired.clone()
        } else {
            Address::new(format!("0xhv{i:02}"))
        };
        let entry = HighValueToken::new(token_id, *name, *symbol, 50_000_000 + i as u128, 200)
            .expect("fixture clears the high-value bar");
        high_value.push(entry);
    }
    fs::write(
        args.out.join("high_value.json"),
        serde_json::to_string_pretty(&high_value)?,
    )?;

    let prices: BTreeMap<&Address, f64> = BTreeMap::from([(paired, 2_000.0)]);
    fs::write(
        args.out.join("prices.json"),
        serde_json::to_string_pretty(&prices)?,
    )?;
    Ok(())
}

fn print_summary(args: &SynthArgs, armed_total: usize) -> Result<()> {
    let counts: BTreeMap<&str, usize> = args
        .counts
        .0
        .iter()
        .map(|(category, n)| (category.short(), *n))
        .collect();
    super::print_json(&json!({
        "seed": args.seed,
        "armed": armed_total,
        "benign": args.benign,
        "counts": counts,
        "histories": args.histories,
        "out": args.out,
    }))
}
