//! Trading-history simulation: plays a scripted market life against a
//! deployed token and its pool, producing the ordered event streams the
//! on-chain filter and analytics consume.
//!
//! The script follows the common scam arc — deploy, seed liquidity,
//! attract buyers, stonewall their sells, then pull the pool — but every
//! knob is configurable, so benign lives and filter-evading variants
//! (a brief disarmed window in which early traders cash out) come from
//! the same machinery.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::amm::{PoolState, SwapSide};
use crate::events::{EventKind, EventRecord};
use crate::tokenvm::{TokenInstance, TokenSpec};
use crate::types::Address;

/// Script for one token's market life.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// The token on the other side of the pool (typically high-value).
    pub paired_token: Address,
    pub creation_block: u64,
    /// Blocks between the pool's first and last event.
    pub listed_blocks: u64,
    /// Distinct addresses that buy.
    pub buyers: usize,
    /// How many of the buyers later attempt to sell.
    pub sellers: usize,
    /// Early traders who buy *and* sell during a window in which the
    /// deployer has temporarily disarmed the traps. Nonzero values give
    /// armed tokens a second distinct seller, defeating single-seller
    /// heuristics.
    pub open_window_sells: usize,
    /// Token units the deployer seeds the pool with.
    pub token_liquidity: u128,
    /// Paired-token units seeded alongside.
    pub paired_liquidity: u128,
    /// Whether the deployer dumps and withdraws liquidity at the end.
    pub rug: bool,
}

impl ScenarioConfig {
    /// A mid-sized scripted life: a dozen buyers, three attempted sells,
    /// and a closing rug, spread over `listed_blocks` blocks.
    pub fn standard(paired_token: Address, creation_block: u64, listed_blocks: u64) -> Self {
        ScenarioConfig {
            paired_token,
            creation_block,
            listed_blocks,
            buyers: 12,
            sellers: 3,
            open_window_sells: 0,
            token_liquidity: 1_000_000,
            paired_liquidity: 1_000_000,
            rug: true,
        }
    }
}

/// Everything the simulated life left behind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TokenHistory {
    pub token_id: Address,
    pub pool_id: Address,
    pub paired_token: Address,
    pub creation_block: u64,
    /// The token contract's `Transfer` stream, ordered by (block, log).
    pub token_events: Vec<EventRecord>,
    /// The pair contract's stream (`Mint`/`Swap`/`Burn`/`Sync`), ordered.
    pub pool_events: Vec<EventRecord>,
    /// Pool reserves after the final action.
    pub final_pool: PoolState,
}

/// Mechanical pool-address convention used across the corpus.
pub fn pool_address(token_id: &Address) -> Address {
    Address::new(format!("{token_id}:pool"))
}

struct EventLog {
    log_index: u64,
    token_events: Vec<EventRecord>,
    pool_events: Vec<EventRecord>,
}

impl EventLog {
    fn new() -> Self {
        EventLog {
            log_index: 0,
            token_events: Vec::new(),
            pool_events: Vec::new(),
        }
    }

    fn push_token(&mut self, block: u64, kind: EventKind) {
        self.token_events
            .push(EventRecord::new(block, self.log_index, kind));
        self.log_index += 1;
    }

    fn push_pool(&mut self, block: u64, kind: EventKind) {
        self.pool_events
            .push(EventRecord::new(block, self.log_index, kind));
        self.log_index += 1;
    }
}

/// Play the configured script against a fresh deployment of `spec`.
///
/// Buys swap paired-token in and move tokens pool→buyer; sell attempts
/// move tokens buyer→pool and, when the token lets them through, swap
/// the delivered amount out. Failed transfers consume their block but
/// log nothing, like any reverted transaction. The last scripted action
/// lands exactly `listed_blocks` after the pool's opening `Mint`.
pub fn simulate_history(spec: &TokenSpec, config: &ScenarioConfig, seed: u64) -> TokenHistory {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut token = TokenInstance::deploy(spec.clone());
    let owner = spec.owner.clone();
    let pool_id = pool_address(&spec.id);
    let mut log = EventLog::new();

    // Deploy: the mint transfer, then the deployer seeds the pool.
    log.push_token(
        config.creation_block,
        EventKind::Transfer {
            from: Address::new("0x0"),
            to: owner.clone(),
            amount: spec.total_supply,
        },
    );
    // Seed at most half the supply: the deployer keeps a stash to dump
    // if the script ends in a rug.
    let seed_amount = config.token_liquidity.min(spec.total_supply / 2).max(1);
    let seeded = match token.transfer(&owner, &pool_id, seed_amount, &pool_id) {
        Ok(receipt) => {
            let delivered = receipt.delivered;
            for kind in receipt.events {
                log.push_token(config.creation_block, kind);
            }
            delivered
        }
        Err(_) => 0,
    };
    let mut pool = PoolState::create_pair(spec.id.clone(), config.paired_token.clone())
        .expect("token and paired token are distinct");
    if seeded > 0 {
        let (next, _, events) = pool
            .add_liquidity(seeded, config.paired_liquidity, &owner)
            .expect("first deposit cannot mismatch");
        pool = next;
        for kind in events {
            log.push_pool(config.creation_block, kind);
        }
    }

    // Schedule the remaining actions across the listing span; the final
    // slot is exactly `creation_block + listed_blocks`.
    let window_actions = config.open_window_sells * 2;
    let sell_actions = config.sellers.min(config.buyers);
    let total_actions = window_actions + config.buyers + sell_actions + usize::from(config.rug);
    let action_block = |i: usize| -> u64 {
        if total_actions == 0 {
            config.creation_block
        } else {
            config.creation_block + ((i as u64 + 1) * config.listed_blocks) / total_actions as u64
        }
    };
    let mut action = 0usize;

    // Open window: traps off, early traders round-trip profitably.
    if config.open_window_sells > 0 {
        let armed = std::mem::take(&mut token.traps);
        for i in 0..config.open_window_sells {
            let trader = Address::new(format!("{}:early{i}", spec.id));
            let buy_block = action_block(action);
            action += 1;
            let bought = buy(
                &mut token, &mut pool, &mut log, &pool_id, &trader, buy_block, &mut rng,
            );
            let sell_block = action_block(action);
            action += 1;
            if bought > 0 {
                attempt_sell(
                    &mut token, &mut pool, &mut log, &pool_id, &trader, sell_block,
                );
            }
        }
        token.traps = armed;
    }

    // Buyers come in one per block slot.
    let buyer_ids: Vec<Address> = (0..config.buyers)
        .map(|i| Address::new(format!("{}:buyer{i}", spec.id)))
        .collect();
    for buyer in &buyer_ids {
        let block = action_block(action);
        action += 1;
        buy(
            &mut token, &mut pool, &mut log, &pool_id, buyer, block, &mut rng,
        );
    }

    // A subset of them try to cash out.
    for seller in buyer_ids.iter().take(sell_actions) {
        let block = action_block(action);
        action += 1;
        attempt_sell(&mut token, &mut pool, &mut log, &pool_id, seller, block);
    }

    // The rug: the deployer dumps their remaining stash and drains the
    // pool in the listing's final block.
    if config.rug {
        let block = action_block(action);
        let stash = token.balance_of(&owner) / 2;
        if stash > 0 {
            if let Ok(receipt) = token.transfer(&owner, &pool_id, stash, &pool_id) {
                for kind in receipt.events {
                    log.push_token(block, kind);
                }
                if let Ok((next, _, events)) =
                    pool.execute_swap(receipt.delivered, SwapSide::XInYOut, &owner)
                {
                    pool = next;
                    for kind in events {
                        log.push_pool(block, kind);
                    }
                }
            }
        }
        let shares = pool.lp_balances.get(&owner).copied().unwrap_or(0);
        if shares > 0 {
            if let Ok((next, _, _, events)) = pool.remove_liquidity(shares, &owner) {
                pool = next;
                for kind in events {
                    log.push_pool(block, kind);
                }
            }
        }
    }

    TokenHistory {
        token_id: spec.id.clone(),
        pool_id,
        paired_token: config.paired_token.clone(),
        creation_block: config.creation_block,
        token_events: log.token_events,
        pool_events: log.pool_events,
        final_pool: pool,
    }
}

/// Swap paired-token in, move the quoted tokens pool→buyer. Returns the
/// amount the buyer actually received (zero when the buy leg failed).
fn buy(
    token: &mut TokenInstance,
    pool: &mut PoolState,
    log: &mut EventLog,
    pool_id: &Address,
    buyer: &Address,
    block: u64,
    rng: &mut ChaCha8Rng,
) -> u128 {
    if pool.reserve_x == 0 || pool.reserve_y == 0 {
        return 0;
    }
    let base = (pool.reserve_y / 200).max(1);
    let jitter = rng.gen_range(0..=base / 2);
    let paired_in = base + jitter;
    let Ok(quote) = pool.quote_swap(paired_in, SwapSide::YInXOut) else {
        return 0;
    };
    if quote.amount_out == 0 {
        return 0;
    }
    match token.transfer(pool_id, buyer, quote.amount_out, pool_id) {
        Ok(receipt) => {
            let (next, _, events) = pool
                .execute_swap(paired_in, SwapSide::YInXOut, buyer)
                .expect("quote already validated");
            *pool = next;
            for kind in events {
                log.push_pool(block, kind);
            }
            for kind in receipt.events {
                log.push_token(block, kind);
            }
            receipt.delivered
        }
        Err(_) => 0,
    }
}

/// Move the seller's whole balance back to the pool; on success, swap
/// the delivered amount out for paired tokens. A refusal logs nothing.
fn attempt_sell(
    token: &mut TokenInstance,
    pool: &mut PoolState,
    log: &mut EventLog,
    pool_id: &Address,
    seller: &Address,
    block: u64,
) {
    let balance = token.balance_of(seller);
    if balance == 0 {
        return;
    }
    match token.transfer(seller, pool_id, balance, pool_id) {
        Ok(receipt) => {
            for kind in receipt.events {
                log.push_token(block, kind);
            }
            if receipt.delivered > 0 {
                if let Ok((next, _, events)) =
                    pool.execute_swap(receipt.delivered, SwapSide::XInYOut, seller)
                {
                    *pool = next;
                    for kind in events {
                        log.push_pool(block, kind);
                    }
                }
            }
        }
        Err(_) => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::analytics::lifetime;
    use crate::corpus::filter::{is_suspicious, trade_stats, DEFAULT_MONTH_BLOCKS};
    use crate::corpus::records::{PoolLink, TokenRecord};
    use crate::events::is_ordered;
    use crate::tokenvm::{sample_spec, Category, Placement};
    use std::collections::BTreeSet;

    fn record_for(history: &TokenHistory) -> TokenRecord {
        TokenRecord {
            token_id: history.token_id.clone(),
            name: "Test".into(),
            symbol: "TST".into(),
            creator: Address::new(format!("{}:deployer", history.token_id)),
            creation_block: history.creation_block,
            has_source: true,
            paths: Default::default(),
            pools: vec![PoolLink {
                pool_id: history.pool_id.clone(),
                paired_token: history.paired_token.clone(),
            }],
        }
    }

    fn weth() -> Address {
        Address::new("0xweth")
    }

    fn hv_set() -> BTreeSet<Address> {
        BTreeSet::from([weth()])
    }

    #[test]
    fn histories_are_ordered_and_reproducible() {
        let spec = TokenSpec::benign("0xplain", "Plain", "PLN", 10_000_000);
        let config = ScenarioConfig::standard(weth(), 500, 1_000);
        let a = simulate_history(&spec, &config, 9);
        let b = simulate_history(&spec, &config, 9);
        assert_eq!(a, b);
        assert!(is_ordered(&a.token_events));
        assert!(is_ordered(&a.pool_events));
        assert!(!a.pool_events.is_empty());
        let c = simulate_history(&spec, &config, 10);
        assert_ne!(a, c, "different seeds should vary trade sizes");
    }

    #[test]
    fn armed_token_with_rug_trips_every_filter_rule() {
        let spec = sample_spec(Category::Permission, Placement::Inline, 0);
        let mut config = ScenarioConfig::standard(weth(), 100, DEFAULT_MONTH_BLOCKS);
        config.buyers = 12;
        config.sellers = 5;
        let history = simulate_history(&spec, &config, 3);
        let record = record_for(&history);
        let stats = trade_stats(&record, &history.pool_events, &hv_set());
        assert!(stats.paired_with_high_value);
        assert_eq!(
            stats.distinct_sellers, 1,
            "only the deployer's own dump sells"
        );
        assert!(stats.distinct_buyers >= 10);
        assert_eq!(stats.listed_blocks, DEFAULT_MONTH_BLOCKS);
        assert!(is_suspicious(&stats, DEFAULT_MONTH_BLOCKS));
    }

    #[test]
    fn benign_token_has_many_sellers_and_escapes_the_filter() {
        let spec = TokenSpec::benign("0xfair", "Fair", "FAIR", 10_000_000);
        let mut config = ScenarioConfig::standard(weth(), 100, DEFAULT_MONTH_BLOCKS);
        config.buyers = 12;
        config.sellers = 5;
        let history = simulate_history(&spec, &config, 3);
        let record = record_for(&history);
        let stats = trade_stats(&record, &history.pool_events, &hv_set());
        assert!(stats.distinct_sellers > 1, "buyers cash out freely");
        assert!(!is_suspicious(&stats, DEFAULT_MONTH_BLOCKS));
    }

    #[test]
    fn open_window_gives_an_armed_token_extra_sellers() {
        let spec = sample_spec(Category::Suspension, Placement::Inline, 0);
        let mut config = ScenarioConfig::standard(weth(), 100, DEFAULT_MONTH_BLOCKS);
        config.open_window_sells = 2;
        let history = simulate_history(&spec, &config, 3);
        let record = record_for(&history);
        let stats = trade_stats(&record, &history.pool_events, &hv_set());
        assert!(
            stats.distinct_sellers > 1,
            "early traders sold during the window"
        );
        assert!(
            !is_suspicious(&stats, DEFAULT_MONTH_BLOCKS),
            "the window defeats the filter"
        );
    }

    #[test]
    fn rugged_token_lifetime_matches_the_listing_span() {
        let spec = sample_spec(Category::AmountLimit, Placement::Inline, 0);
        let config = ScenarioConfig::standard(weth(), 250, 4_000);
        let history = simulate_history(&spec, &config, 11);
        // The owner's final dump is a Transfer in the last listed block.
        assert_eq!(
            lifetime(&history.token_events, history.creation_block),
            4_000
        );
        let record = record_for(&history);
        let stats = trade_stats(&record, &history.pool_events, &hv_set());
        assert_eq!(stats.listed_blocks, 4_000);
    }

    #[test]
    fn without_a_rug_the_last_trade_closes_the_span() {
        let spec = TokenSpec::benign("0xnorug", "NoRug", "NR", 10_000_000);
        let mut config = ScenarioConfig::standard(weth(), 10, 600);
        config.rug = false;
        let history = simulate_history(&spec, &config, 2);
        let first = history.pool_events.first().expect("has events").block;
        let last = history.pool_events.last().expect("has events").block;
        assert_eq!(first, 10);
        assert_eq!(last, 610);
    }

    #[test]
    fn armed_sells_log_no_events() {
        let spec = sample_spec(Category::Permission, Placement::Inline, 0);
        let mut config = ScenarioConfig::standard(weth(), 1, 100);
        config.rug = false;
        config.sellers = 5;
        let history = simulate_history(&spec, &config, 7);
        let token_sells = history
            .pool_events
            .iter()
            .filter(|e| {
                matches!(&e.kind, EventKind::Swap { token_in, .. } if *token_in == history.token_id)
            })
            .count();
        assert_eq!(token_sells, 0, "every sell attempt reverted");
    }
}
