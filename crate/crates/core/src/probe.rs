//! The buy-and-sell check.
//!
//! A probe answers one question about a live token+pool pair: can a fresh
//! investor buy on the pool and then sell at no more than an acceptable fee?
//! It buys `min(pool liquidity, 1000)` token units, then sells half of what
//! it actually holds, asserting on each leg that the counterpart received at
//! least `amount × (1 − acc_fee)`. Failures keep the structured error trace
//! the token raised; excessive-fee failures keep the observed fee and the fee
//! variable that charged it.
//!
//! Everything runs against a clone of the token state, so probing never
//! perturbs the world it measures. Fees are measured on the token-transfer
//! leg alone; pool pricing slippage is out of scope here.

use crate::tokenvm::{ErrorTrace, TokenInstance};
use crate::types::{Address, Ratio};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Probe parameters. `acc_fee` is the highest tolerable fee on either leg;
/// the buy cap and sell fraction are the fixed procedure constants.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub acc_fee: Ratio,
    pub buy_amount_cap: u128,
    pub sell_fraction: Ratio,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            acc_fee: Ratio::new(30, 100),
            buy_amount_cap: 1000,
            sell_fraction: Ratio::new(1, 2),
        }
    }
}

impl ProbeConfig {
    /// A default-shaped config with a different fee tolerance.
    pub fn with_acc_fee(acc_fee: Ratio) -> Self {
        ProbeConfig {
            acc_fee,
            ..ProbeConfig::default()
        }
    }
}

/// Faults of the harness rather than verdicts about the token.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum ProbeError {
    #[error("token has no exchange pool")]
    MissingPool,
    #[error("exchange pool holds no token liquidity")]
    EmptyPool,
}

/// What the probe observed. Sell-side fields stay `None` when the buy left
/// the investor with nothing to sell (or too little to halve).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeOutcome {
    pub buy_ok: bool,
    /// `None` means the sell leg never ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sell_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub buy_fee_observed: Option<Ratio>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sell_fee_observed: Option<Ratio>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub buy_trace: Option<ErrorTrace>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sell_trace: Option<ErrorTrace>,
    /// Fee variable that charged the buy leg, straight off the receipt.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub buy_fee_identifier: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sell_fee_identifier: Option<String>,
}

impl ProbeOutcome {
    fn fresh() -> Self {
        ProbeOutcome {
            buy_ok: false,
            sell_ok: None,
            buy_fee_observed: None,
            sell_fee_observed: None,
            buy_trace: None,
            sell_trace: None,
            buy_fee_identifier: None,
            sell_fee_identifier: None,
        }
    }

    /// The failing leg's trace: the sell trace when the sell ran, otherwise
    /// the buy trace.
    pub fn decisive_trace(&self) -> Option<&ErrorTrace> {
        match self.sell_ok {
            Some(_) => self.sell_trace.as_ref(),
            None => self.buy_trace.as_ref(),
        }
    }

    /// The failing leg's fee identifier, mirroring [`Self::decisive_trace`].
    pub fn decisive_fee_identifier(&self) -> Option<&str> {
        match self.sell_ok {
            Some(_) => self.sell_fee_identifier.as_deref(),
            None => self.buy_fee_identifier.as_deref(),
        }
    }

    /// Both legs ran and passed.
    pub fn clean_pass(&self) -> bool {
        self.buy_ok && self.sell_ok == Some(true)
    }
}

/// `received/sent ≥ 1 − acc_fee`, compared exactly by cross-multiplication.
fn fee_acceptable(sent: u128, received: u128, acc_fee: &Ratio) -> bool {
    let kept_num = acc_fee.den.saturating_sub(acc_fee.num);
    received * acc_fee.den >= sent * kept_num
}

/// Run the buy leg then, holdings permitting, the sell leg, against a clone
/// of `token`. `pool` is the exchange pool's address in the token's ledger;
/// `None` reports the missing-pool infrastructure fault.
pub fn run_probe(
    token: &TokenInstance,
    pool: Option<&Address>,
    config: &ProbeConfig,
) -> Result<ProbeOutcome, ProbeError> {
    let pool = pool.ok_or(ProbeError::MissingPool)?;
    let mut world = token.clone();
    let investor = Address::new(format!("{}:probe-investor", token.spec.id));
    let mut outcome = ProbeOutcome::fresh();

    // Buy: the pool delivers min(liquidity, cap) through the transfer path.
    let liquidity = world.balance_of(pool);
    if liquidity == 0 {
        return Err(ProbeError::EmptyPool);
    }
    let buy_amount = liquidity.min(config.buy_amount_cap);
    match world.transfer(pool, &investor, buy_amount, pool) {
        Ok(receipt) => {
            outcome.buy_fee_observed = Some(Ratio::new(buy_amount - receipt.delivered, buy_amount));
            outcome.buy_fee_identifier = receipt.fee_identifier;
            outcome.buy_ok = fee_acceptable(buy_amount, receipt.delivered, &config.acc_fee);
        }
        Err(trace) => {
            outcome.buy_trace = Some(trace);
        }
    }

    // Sell: half of whatever the investor actually holds.
    let holdings = world.balance_of(&investor);
    let sell_amount = holdings * config.sell_fraction.num / config.sell_fraction.den;
    if sell_amount == 0 {
        return Ok(outcome);
    }
    match world.transfer(&investor, pool, sell_amount, pool) {
        Ok(receipt) => {
            outcome.sell_fee_observed =
                Some(Ratio::new(sell_amount - receipt.delivered, sell_amount));
            outcome.sell_fee_identifier = receipt.fee_identifier;
            outcome.sell_ok = Some(fee_acceptable(
                sell_amount,
                receipt.delivered,
                &config.acc_fee,
            ));
        }
        Err(trace) => {
            outcome.sell_trace = Some(trace);
            outcome.sell_ok = Some(false);
        }
    }
    Ok(outcome)
}
