//! Token records, high-value metadata, and flat-file persistence.
//!
//! Everything the batch tooling reads or writes lives in plain files:
//! manifests and event histories are JSON lines (one record per line),
//! datasets are CSV.  Writes go through a temporary file in the target
//! directory followed by a rename, so readers never observe a partially
//! written artifact.

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::events::{is_ordered, EventRecord};
use crate::tokenvm::{Category, TokenSpec};
use crate::types::Address;

/// Definition of a high-value token: at least this much market
/// capitalization…
pub const HIGH_VALUE_MIN_MARKET_CAP_USD: u128 = 1_000_000;
/// …and pairings in at least this many exchange pools.
pub const HIGH_VALUE_MIN_POOLS: u64 = 50;

#[derive(Debug, Error, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum CorpusError {
    #[error("i/o failure: {detail}")]
    Io { detail: String },
    #[error("manifest line {line} is not a valid record: {detail}")]
    BadRecord { line: usize, detail: String },
    #[error("token has no event stream")]
    MissingEvents,
    #[error("event stream is not ordered by (block, log_index)")]
    UnorderedEvents,
    #[error("no usd price for paired token {token_id}")]
    MissingPrice { token_id: Address },
    #[error("${market_cap_usd} market cap with {pool_count} pools misses the high-value bar")]
    BelowHighValueBar {
        market_cap_usd: u128,
        pool_count: u64,
    },
}

impl From<std::io::Error> for CorpusError {
    fn from(e: std::io::Error) -> Self {
        CorpusError::Io {
            detail: e.to_string(),
        }
    }
}

/// One exchange pool a token trades in, with the token on the other side
/// of the pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolLink {
    pub pool_id: Address,
    pub paired_token: Address,
}

/// Where a token's static and dynamic artifacts live on disk, relative to
/// the manifest that names them.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixturePaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ast: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bytecode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub events: Option<String>,
}

/// Catalog entry for one token: identity, provenance, artifact paths, and
/// the pools it trades in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenRecord {
    pub token_id: Address,
    pub name: String,
    pub symbol: String,
    pub creator: Address,
    pub creation_block: u64,
    pub has_source: bool,
    #[serde(default)]
    pub paths: FixturePaths,
    #[serde(default)]
    pub pools: Vec<PoolLink>,
}

impl TokenRecord {
    /// Tokens with no pool cannot be probed, filtered, or feature-extracted.
    pub fn is_analyzable(&self) -> bool {
        !self.pools.is_empty()
    }
}

/// A token that clears both high-value thresholds, with the identity
/// fields impersonation checks compare against.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HighValueToken {
    pub token_id: Address,
    pub name: String,
    pub symbol: String,
    pub market_cap_usd: u128,
    pub pool_count: u64,
}

impl HighValueToken {
    /// Validated constructor: rejects candidates below either threshold.
    pub fn new(
        token_id: impl Into<Address>,
        name: impl Into<String>,
        symbol: impl Into<String>,
        market_cap_usd: u128,
        pool_count: u64,
    ) -> Result<Self, CorpusError> {
        if market_cap_usd < HIGH_VALUE_MIN_MARKET_CAP_USD || pool_count < HIGH_VALUE_MIN_POOLS {
            return Err(CorpusError::BelowHighValueBar {
                market_cap_usd,
                pool_count,
            });
        }
        Ok(HighValueToken {
            token_id: token_id.into(),
            name: name.into(),
            symbol: symbol.into(),
            market_cap_usd,
            pool_count,
        })
    }
}

/// One line of a corpus manifest: the full generative spec, its ground
/// truth, and where the token's fixtures were written.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub spec: TokenSpec,
    /// Ground-truth trap categories; empty for benign tokens.
    #[serde(default)]
    pub categories: BTreeSet<Category>,
    #[serde(default)]
    pub paths: FixturePaths,
}

/// Write `lines` of serialized records to `path` atomically (temp file in
/// the same directory, then rename).
fn write_json_lines<T: Serialize>(path: &Path, items: &[T]) -> Result<(), CorpusError> {
    let tmp = path.with_extension("tmp");
    {
        let file = fs::File::create(&tmp)?;
        let mut out = BufWriter::new(file);
        for item in items {
            let line = serde_json::to_string(item).map_err(|e| CorpusError::Io {
                detail: e.to_string(),
            })?;
            out.write_all(line.as_bytes())?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn read_json_lines<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CorpusError> {
    let file = fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut items = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line).map_err(|e| CorpusError::BadRecord {
            line: i + 1,
            detail: e.to_string(),
        })?;
        items.push(item);
    }
    Ok(items)
}

pub fn write_manifest(path: &Path, entries: &[ManifestEntry]) -> Result<(), CorpusError> {
    write_json_lines(path, entries)
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>, CorpusError> {
    read_json_lines(path)
}

pub fn write_token_records(path: &Path, records: &[TokenRecord]) -> Result<(), CorpusError> {
    write_json_lines(path, records)
}

pub fn read_token_records(path: &Path) -> Result<Vec<TokenRecord>, CorpusError> {
    read_json_lines(path)
}

pub fn write_events(path: &Path, events: &[EventRecord]) -> Result<(), CorpusError> {
    write_json_lines(path, events)
}

/// Read an event stream and verify its `(block, log_index)` ordering.
pub fn read_events(path: &Path) -> Result<Vec<EventRecord>, CorpusError> {
    let events: Vec<EventRecord> = read_json_lines(path)?;
    if !is_ordered(&events) {
        return Err(CorpusError::UnorderedEvents);
    }
    Ok(events)
}
