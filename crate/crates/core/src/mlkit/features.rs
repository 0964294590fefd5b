//! Exchange-history features extracted from token and pool event logs.
//!
//! A token's trading record betrays trap behavior even when its code is
//! obfuscated: trapped tokens tend to show short lifetimes, buyers without
//! sellers, and value flowing into the pool but never out.  This module
//! reduces the two event streams (the token's `Transfer` log and its pool's
//! `Swap`/`Sync`/`Mint`/`Burn` log) to the seventeen numeric features used
//! by the classifiers.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::events::{is_ordered, EventKind, EventRecord};
use crate::types::{Address, Ratio};

/// The seventeen exchange features of one token.
///
/// Counts are event counts, ratios are fractions of `n_transfers`, amounts
/// are in the token's base units, and lifetimes are in blocks.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExchangeFeatures {
    /// Transfers between any two addresses.
    pub n_transfers: u64,
    /// Transfers from or to the token's own address.
    pub n_token_transfers: u64,
    /// `n_token_transfers / n_transfers` (0 when there are no transfers).
    pub r_token_transfers: Ratio,
    /// Transfers from or to the creator address.
    pub n_creator_transfers: u64,
    /// `n_creator_transfers / n_transfers` (0 when there are no transfers).
    pub r_creator_transfers: Ratio,
    /// Blocks from the token's first recorded event to its last transfer.
    pub life_time: u64,
    pub n_swap: u64,
    pub n_sync: u64,
    pub n_burn: u64,
    pub n_mint: u64,
    /// Distinct addresses that swapped against the pool.
    pub n_users: u64,
    /// Distinct liquidity providers (mint or burn).
    pub n_providers: u64,
    /// Distinct users who swapped another token for this token.
    pub n_buyers: u64,
    /// Distinct users who swapped this token away.
    pub n_sellers: u64,
    /// Total of this token flowing into the pool.
    #[serde(with = "crate::types::dec_string")]
    pub sell_amt: u128,
    /// Total of this token flowing out of the pool.
    #[serde(with = "crate::types::dec_string")]
    pub buy_amt: u128,
    /// Blocks from the pool's first recorded event to its last.
    pub pool_life_time: u64,
}

impl ExchangeFeatures {
    /// Feature names in serialization order.
    pub fn names() -> [&'static str; 17] {
        [
            "n_transfers",
            "n_token_transfers",
            "r_token_transfers",
            "n_creator_transfers",
            "r_creator_transfers",
            "life_time",
            "n_swap",
            "n_sync",
            "n_burn",
            "n_mint",
            "n_users",
            "n_providers",
            "n_buyers",
            "n_sellers",
            "sell_amt",
            "buy_amt",
            "pool_life_time",
        ]
    }

    /// Numeric row in `names()` order for dataset assembly.
    pub fn to_feature_row(&self) -> Vec<f64> {
        vec![
            self.n_transfers as f64,
            self.n_token_transfers as f64,
            self.r_token_transfers.as_f64(),
            self.n_creator_transfers as f64,
            self.r_creator_transfers.as_f64(),
            self.life_time as f64,
            self.n_swap as f64,
            self.n_sync as f64,
            self.n_burn as f64,
            self.n_mint as f64,
            self.n_users as f64,
            self.n_providers as f64,
            self.n_buyers as f64,
            self.n_sellers as f64,
            self.sell_amt as f64,
            self.buy_amt as f64,
            self.pool_life_time as f64,
        ]
    }
}

/// Event-stream validation failures.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum FeatureError {
    /// Events are not strictly ordered by `(block, log_index)`.
    #[error("{stream} events out of order")]
    OutOfOrder { stream: String },
}

fn transfer_ratio(part: u64, whole: u64) -> Ratio {
    if whole == 0 {
        Ratio::ZERO
    } else {
        Ratio::new(part as u128, whole as u128)
    }
}

/// Extract the seventeen features from a token's transfer log and its
/// pool's event log.
///
/// Both streams must be strictly ordered by `(block, log_index)`.  The
/// token's creation is taken as its first recorded event, and the pool's as
/// its first; histories produced by the corpus generator start at the
/// creation block, so the first event pins it.  `pool_id` is accepted for
/// histories that interleave several pools; single-pool streams do not need
/// it.
pub fn exchange_features(
    token_events: &[EventRecord],
    pool_events: &[EventRecord],
    token_id: &Address,
    creator: &Address,
    _pool_id: &Address,
) -> Result<ExchangeFeatures, FeatureError> {
    if !is_ordered(token_events) {
        return Err(FeatureError::OutOfOrder {
            stream: "token".into(),
        });
    }
    if !is_ordered(pool_events) {
        return Err(FeatureError::OutOfOrder {
            stream: "pool".into(),
        });
    }

    let mut features = ExchangeFeatures::default();
    let mut last_transfer_block: Option<u64> = None;

    for event in token_events {
        if let EventKind::Transfer { from, to, .. } = &event.kind {
            features.n_transfers += 1;
            last_transfer_block = Some(event.block);
            if from == token_id || to == token_id {
                features.n_token_transfers += 1;
            }
            if from == creator || to == creator {
                features.n_creator_transfers += 1;
            }
        }
    }
    features.r_token_transfers = transfer_ratio(features.n_token_transfers, features.n_transfers);
    features.r_creator_transfers =
        transfer_ratio(features.n_creator_transfers, features.n_transfers);

    if let (Some(first), Some(last)) = (token_events.first(), last_transfer_block) {
        features.life_time = last.saturating_sub(first.block);
    }

    let mut users: BTreeSet<&Address> = BTreeSet::new();
    let mut providers: BTreeSet<&Address> = BTreeSet::new();
    let mut buyers: BTreeSet<&Address> = BTreeSet::new();
    let mut sellers: BTreeSet<&Address> = BTreeSet::new();

    for event in pool_events {
        match &event.kind {
            EventKind::Swap {
                sender,
                token_in,
                amount_in,
                token_out,
                amount_out,
            } => {
                features.n_swap += 1;
                users.insert(sender);
                if token_in == token_id {
                    sellers.insert(sender);
                    features.sell_amt += amount_in;
                }
                if token_out == token_id {
                    buyers.insert(sender);
                    features.buy_amt += amount_out;
                }
            }
            EventKind::Sync { .. } => features.n_sync += 1,
            EventKind::Mint { provider, .. } => {
                features.n_mint += 1;
                providers.insert(provider);
            }
            EventKind::Burn { provider, .. } => {
                features.n_burn += 1;
                providers.insert(provider);
            }
            EventKind::Transfer { .. } => {}
        }
    }
    features.n_users = users.len() as u64;
    features.n_providers = providers.len() as u64;
    features.n_buyers = buyers.len() as u64;
    features.n_sellers = sellers.len() as u64;

    if let (Some(first), Some(last)) = (pool_events.first(), pool_events.last()) {
        features.pool_life_time = last.block.saturating_sub(first.block);
    }

    Ok(features)
}
