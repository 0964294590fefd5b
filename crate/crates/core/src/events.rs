//! On-chain event records.
//!
//! Histories are persisted as JSON lines, one record per line, ordered by
//! `(block, log_index)`. Token contracts log `Transfer`; pools log `Swap`,
//! `Sync`, `Mint`, and `Burn`. Amounts are 128-bit and carried as decimal
//! strings on the wire, the way chain APIs ship uint256 values.

use crate::types::{dec_string, Address};
use serde::{Deserialize, Serialize};

/// One logged event. `block` and `log_index` place it in a total order within
/// a stream.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRecord {
    pub block: u64,
    pub log_index: u64,
    #[serde(flatten)]
    pub kind: EventKind,
}

/// Event payloads. Swaps name the traded tokens explicitly instead of using a
/// token0/token1 convention.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum EventKind {
    Transfer {
        from: Address,
        to: Address,
        #[serde(with = "dec_string")]
        amount: u128,
    },
    Swap {
        sender: Address,
        token_in: Address,
        #[serde(with = "dec_string")]
        amount_in: u128,
        token_out: Address,
        #[serde(with = "dec_string")]
        amount_out: u128,
    },
    Sync {
        token_x: Address,
        #[serde(with = "dec_string")]
        reserve_x: u128,
        token_y: Address,
        #[serde(with = "dec_string")]
        reserve_y: u128,
    },
    Mint {
        provider: Address,
        #[serde(with = "dec_string")]
        amount_x: u128,
        #[serde(with = "dec_string")]
        amount_y: u128,
    },
    Burn {
        provider: Address,
        #[serde(with = "dec_string")]
        amount_x: u128,
        #[serde(with = "dec_string")]
        amount_y: u128,
    },
}

impl EventRecord {
    pub fn new(block: u64, log_index: u64, kind: EventKind) -> Self {
        EventRecord {
            block,
            log_index,
            kind,
        }
    }

    pub fn is_transfer(&self) -> bool {
        matches!(self.kind, EventKind::Transfer { .. })
    }
}

/// True when the stream is strictly ordered by `(block, log_index)`.
pub fn is_ordered(events: &[EventRecord]) -> bool {
    events
        .windows(2)
        .all(|w| (w[0].block, w[0].log_index) < (w[1].block, w[1].log_index))
}
