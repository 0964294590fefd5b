//! The suspicious-token filter.
//!
//! Four rules narrow a token catalog down to candidates worth auditing:
//! the token trades against a high-value token (R1), was sold by at most
//! one holder (R2) — the signature asymmetry of a token many can buy but
//! only its operator can exit — was bought by at least ten investors
//! (R3), and stayed listed for at least a month (R4).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::events::{EventKind, EventRecord};
use crate::types::Address;

use super::records::TokenRecord;

/// One month of blocks at 13 seconds per block; R4's default threshold.
pub const DEFAULT_MONTH_BLOCKS: u64 = 199_384;

/// Trading facts about one token, computed from its pool event streams.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenTradeStats {
    /// R1: some pool pairs the token with a high-value token.
    pub paired_with_high_value: bool,
    /// Distinct addresses that ever swapped the token *into* a pool.
    pub distinct_sellers: usize,
    /// Distinct addresses that ever swapped the token *out of* a pool.
    pub distinct_buyers: usize,
    /// Span in blocks between the first and last pool event.
    pub listed_blocks: u64,
}

/// Fold a token's pool events into [`TokenTradeStats`].  `high_value_ids`
/// is the id set of known high-value tokens for the R1 pairing check.
pub fn trade_stats(
    record: &TokenRecord,
    pool_events: &[EventRecord],
    high_value_ids: &BTreeSet<Address>,
) -> TokenTradeStats {
    let paired_with_high_value = record
        .pools
        .iter()
        .any(|link| high_value_ids.contains(&link.paired_token));
    let mut sellers = BTreeSet::new();
    let mut buyers = BTreeSet::new();
    for event in pool_events {
        if let EventKind::Swap {
            sender,
            token_in,
            token_out,
            ..
        } = &event.kind
        {
            if *token_in == record.token_id {
                sellers.insert(sender.clone());
            }
            if *token_out == record.token_id {
                buyers.insert(sender.clone());
            }
        }
    }
    let listed_blocks = match (pool_events.first(), pool_events.last()) {
        (Some(first), Some(last)) => last.block.saturating_sub(first.block),
        _ => 0,
    };
    TokenTradeStats {
        paired_with_high_value,
        distinct_sellers: sellers.len(),
        distinct_buyers: buyers.len(),
        listed_blocks,
    }
}

/// All four rules hold: paired with a high-value token, sold by at most
/// one holder, bought by at least ten, and listed at least `month_blocks`.
pub fn is_suspicious(stats: &TokenTradeStats, month_blocks: u64) -> bool {
    stats.paired_with_high_value
        && stats.distinct_sellers <= 1
        && stats.distinct_buyers >= 10
        && stats.listed_blocks >= month_blocks
}
