//! Post-hoc corpus analytics: token lifetimes, byte-identical clone
//! groups, name/symbol impersonation of high-value tokens, and realized
//! scammer profit in USD.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::records::{CorpusError, HighValueToken};
use crate::events::{EventKind, EventRecord};
use crate::types::Address;

/// Blocks from creation to the last `Transfer`; zero when the token never
/// transferred (or only transferred in its creation block).
pub fn lifetime(events: &[EventRecord], creation_block: u64) -> u64 {
    events
        .iter()
        .filter(|e| e.is_transfer())
        .map(|e| e.block)
        .max()
        .map_or(0, |last| last.saturating_sub(creation_block))
}

/// SHA-256 of the artifact bytes, lowercase hex.
pub fn code_digest(artifact: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(artifact);
    format!("{:x}", hasher.finalize())
}

/// One token's identity for clone grouping.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloneItem {
    pub token_id: Address,
    pub creator: Address,
    /// Digest of the normalized contract artifact (bytecode or source).
    pub digest: String,
}

/// A set of byte-identical contracts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloneGroup {
    pub digest: String,
    /// Sorted member token ids.
    pub token_ids: Vec<Address>,
    pub distinct_creators: usize,
}

impl CloneGroup {
    pub fn size(&self) -> usize {
        self.token_ids.len()
    }
}

/// Partition tokens by exact digest equality. Every input lands in
/// exactly one group (distinct contracts form singleton groups); groups
/// come out largest first, ties broken by digest.
pub fn clone_groups(items: &[CloneItem]) -> Vec<CloneGroup> {
    let mut by_digest: BTreeMap<&str, (BTreeSet<&Address>, BTreeSet<&Address>)> = BTreeMap::new();
    for item in items {
        let entry = by_digest.entry(&item.digest).or_default();
        entry.0.insert(&item.token_id);
        entry.1.insert(&item.creator);
    }
    let mut groups: Vec<CloneGroup> = by_digest
        .into_iter()
        .map(|(digest, (tokens, creators))| CloneGroup {
            digest: digest.to_string(),
            token_ids: tokens.into_iter().cloned().collect(),
            distinct_creators: creators.len(),
        })
        .collect();
    groups.sort_by(|a, b| {
        b.size()
            .cmp(&a.size())
            .then_with(|| a.digest.cmp(&b.digest))
    });
    groups
}

/// A token passing itself off under a high-value token's name or symbol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FakeTokenMatch {
    pub token_id: Address,
    pub high_value_id: Address,
    pub name_matches: bool,
    pub symbol_matches: bool,
}

/// Case-insensitive exact equality of name or symbol against any
/// high-value entry. A token never matches itself; near-miss spellings
/// ("B0NE" vs "BONE") do not count.
pub fn fake_token_matches(
    records: &[(Address, String, String)],
    high_value: &[HighValueToken],
) -> Vec<FakeTokenMatch> {
    let mut matches = Vec::new();
    for (token_id, name, symbol) in records {
        for hv in high_value {
            if *token_id == hv.token_id {
                continue;
            }
            let name_matches = name.eq_ignore_ascii_case(&hv.name);
            let symbol_matches = symbol.eq_ignore_ascii_case(&hv.symbol);
            if name_matches || symbol_matches {
                matches.push(FakeTokenMatch {
                    token_id: token_id.clone(),
                    high_value_id: hv.token_id.clone(),
                    name_matches,
                    symbol_matches,
                });
            }
        }
    }
    matches
}

/// Net high-value proceeds of the token's pool, in USD at creation-time
/// prices: whatever flowed into the pool (investors buying) minus
/// whatever flowed back out (investors cashing out). Negative when the
/// pool paid out more than it took in.
///
/// Each swap's counterparty token (the side that is not `token_id`) must
/// have a price; a missing price is an error, not a silent zero.
pub fn profit_usd(
    swaps: &[EventRecord],
    token_id: &Address,
    prices: &BTreeMap<Address, f64>,
) -> Result<f64, CorpusError> {
    let mut inflow_usd = 0.0;
    let mut outflow_usd = 0.0;
    for event in swaps {
        if let EventKind::Swap {
            token_in,
            amount_in,
            token_out,
            amount_out,
            ..
        } = &event.kind
        {
            if token_out == token_id {
                // Investor bought the token: high-value entered the pool.
                let price = price_for(prices, token_in)?;
                inflow_usd += *amount_in as f64 * price;
            } else if token_in == token_id {
                // Investor sold the token: high-value left the pool.
                let price = price_for(prices, token_out)?;
                outflow_usd += *amount_out as f64 * price;
            }
        }
    }
    Ok(inflow_usd - outflow_usd)
}

fn price_for(prices: &BTreeMap<Address, f64>, token: &Address) -> Result<f64, CorpusError> {
    prices
        .get(token)
        .copied()
        .ok_or_else(|| CorpusError::MissingPrice {
            token_id: token.clone(),
        })
}
