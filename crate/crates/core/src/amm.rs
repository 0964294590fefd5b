//! Constant-product pool with integer math and a 0.3% input fee.
//!
//! Pricing follows the UniswapV2 pair: the fee is encoded as `997/1000` on the
//! input amount, outputs round down, and every executed swap must keep the
//! fee-adjusted product from shrinking:
//!
//! ```text
//! (reserve_in * 1000 + amount_in * 997) * (reserve_out - amount_out)
//!     >= reserve_in * 1000 * reserve_out
//! ```
//!
//! Pool operations are pure: each returns a new [`PoolState`] plus the event
//! payloads a pair contract would log. Callers assign block numbers and log
//! indexes when they append the payloads to a history.

use crate::events::EventKind;
use crate::types::Address;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Fee numerator kept by the swapper: 997 of 1000, i.e. a 0.3% fee.
pub const FEE_NUMERATOR: u128 = 997;
/// Fee denominator.
pub const FEE_DENOMINATOR: u128 = 1000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AmmError {
    #[error("pool tokens must be distinct")]
    IdenticalTokens,
    #[error("amount must be positive")]
    ZeroAmount,
    #[error("pool has an empty reserve")]
    EmptyReserve,
    #[error("deposit off the reserve ratio by more than one base unit")]
    RatioMismatch,
    #[error("provider {0} holds insufficient pool shares")]
    InsufficientShares(Address),
    #[error("requested output meets or exceeds the reserve")]
    OutputExceedsReserve,
    #[error("amounts too large for 128-bit pool math")]
    Overflow,
}

/// Which reserve the input amount enters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwapSide {
    XInYOut,
    YInXOut,
}

/// Priced swap: the output for a given input and the reserves after the trade.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapQuote {
    pub side: SwapSide,
    pub amount_in: u128,
    pub amount_out: u128,
    pub reserve_x_after: u128,
    pub reserve_y_after: u128,
}

/// A two-token constant-product pool. Value semantics: operations consume
/// `&self` and return the updated state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolState {
    pub token_x: Address,
    pub token_y: Address,
    pub reserve_x: u128,
    pub reserve_y: u128,
    pub fee_numerator: u128,
    pub fee_denominator: u128,
    /// Total pool shares outstanding.
    pub lp_total: u128,
    /// Shares per liquidity provider.
    pub lp_balances: BTreeMap<Address, u128>,
}

/// Floor of the square root, by Newton's method on integers.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    if n < 4 {
        return 1;
    }
    // Start above the root (`n/2 + 1` cannot overflow, unlike `(n+1)/2`).
    let mut x = n;
    let mut y = x / 2 + 1;
    while y < x {
        x = y;
        y = (x + n / x) / 2;
    }
    x
}

impl PoolState {
    /// An empty pair for two distinct tokens.
    pub fn create_pair(token_x: Address, token_y: Address) -> Result<Self, AmmError> {
        if token_x == token_y {
            return Err(AmmError::IdenticalTokens);
        }
        Ok(PoolState {
            token_x,
            token_y,
            reserve_x: 0,
            reserve_y: 0,
            fee_numerator: FEE_NUMERATOR,
            fee_denominator: FEE_DENOMINATOR,
            lp_total: 0,
            lp_balances: BTreeMap::new(),
        })
    }

    fn reserves(&self, side: SwapSide) -> (u128, u128) {
        match side {
            SwapSide::XInYOut => (self.reserve_x, self.reserve_y),
            SwapSide::YInXOut => (self.reserve_y, self.reserve_x),
        }
    }

    /// Price an input amount without executing it:
    /// `floor(reserve_out * in * 997 / (reserve_in * 1000 + in * 997))`.
    pub fn quote_swap(&self, amount_in: u128, side: SwapSide) -> Result<SwapQuote, AmmError> {
        if amount_in == 0 {
            return Err(AmmError::ZeroAmount);
        }
        let (reserve_in, reserve_out) = self.reserves(side);
        if reserve_in == 0 || reserve_out == 0 {
            return Err(AmmError::EmptyReserve);
        }
        let in_with_fee = amount_in
            .checked_mul(self.fee_numerator)
            .ok_or(AmmError::Overflow)?;
        let numerator = reserve_out
            .checked_mul(in_with_fee)
            .ok_or(AmmError::Overflow)?;
        let denominator = reserve_in
            .checked_mul(self.fee_denominator)
            .and_then(|v| v.checked_add(in_with_fee))
            .ok_or(AmmError::Overflow)?;
        let amount_out = numerator / denominator;
        let (reserve_x_after, reserve_y_after) = match side {
            SwapSide::XInYOut => (self.reserve_x + amount_in, self.reserve_y - amount_out),
            SwapSide::YInXOut => (self.reserve_x - amount_out, self.reserve_y + amount_in),
        };
        Ok(SwapQuote {
            side,
            amount_in,
            amount_out,
            reserve_x_after,
            reserve_y_after,
        })
    }

    /// The smallest input that buys at least `amount_out` from the out-side
    /// reserve, per the inverted quote formula.
    pub fn amount_in_for(&self, amount_out: u128, side: SwapSide) -> Result<u128, AmmError> {
        if amount_out == 0 {
            return Err(AmmError::ZeroAmount);
        }
        let (reserve_in, reserve_out) = self.reserves(side);
        if reserve_in == 0 || reserve_out == 0 {
            return Err(AmmError::EmptyReserve);
        }
        if amount_out >= reserve_out {
            return Err(AmmError::OutputExceedsReserve);
        }
        let numerator = reserve_in
            .checked_mul(self.fee_denominator)
            .and_then(|v| v.checked_mul(amount_out))
            .ok_or(AmmError::Overflow)?;
        let denominator = (reserve_out - amount_out)
            .checked_mul(self.fee_numerator)
            .ok_or(AmmError::Overflow)?;
        Ok(numerator / denominator + 1)
    }

    /// Execute a priced swap for `trader`, returning the updated pool, the
    /// quote, and the `Swap` + `Sync` payloads the pair would log.
    pub fn execute_swap(
        &self,
        amount_in: u128,
        side: SwapSide,
        trader: &Address,
    ) -> Result<(PoolState, SwapQuote, Vec<EventKind>), AmmError> {
        let quote = self.quote_swap(amount_in, side)?;
        let mut next = self.clone();
        next.reserve_x = quote.reserve_x_after;
        next.reserve_y = quote.reserve_y_after;
        let (token_in, token_out) = match side {
            SwapSide::XInYOut => (self.token_x.clone(), self.token_y.clone()),
            SwapSide::YInXOut => (self.token_y.clone(), self.token_x.clone()),
        };
        let events = vec![
            EventKind::Swap {
                sender: trader.clone(),
                token_in,
                amount_in,
                token_out,
                amount_out: quote.amount_out,
            },
            next.sync_event(),
        ];
        Ok((next, quote, events))
    }

    /// Deposit both tokens and mint pool shares.
    ///
    /// The first deposit mints `floor(sqrt(dx * dy))` shares; later deposits
    /// must sit within one base unit of the current reserve ratio (on either
    /// leg) and mint `floor(lp_total * dx / reserve_x)`. There is no locked
    /// minimum-liquidity share: the desk-scale pool keeps full redeemability
    /// instead of the pair contract's burned dust.
    pub fn add_liquidity(
        &self,
        dx: u128,
        dy: u128,
        provider: &Address,
    ) -> Result<(PoolState, u128, Vec<EventKind>), AmmError> {
        if dx == 0 || dy == 0 {
            return Err(AmmError::ZeroAmount);
        }
        let minted = if self.lp_total == 0 {
            isqrt(dx.checked_mul(dy).ok_or(AmmError::Overflow)?)
        } else {
            let lhs = dx.checked_mul(self.reserve_y).ok_or(AmmError::Overflow)?;
            let rhs = dy.checked_mul(self.reserve_x).ok_or(AmmError::Overflow)?;
            let tolerance = self.reserve_x.min(self.reserve_y);
            if lhs.abs_diff(rhs) > tolerance {
                return Err(AmmError::RatioMismatch);
            }
            self.lp_total.checked_mul(dx).ok_or(AmmError::Overflow)? / self.reserve_x
        };
        let mut next = self.clone();
        next.reserve_x += dx;
        next.reserve_y += dy;
        next.lp_total += minted;
        *next.lp_balances.entry(provider.clone()).or_insert(0) += minted;
        let events = vec![
            EventKind::Mint {
                provider: provider.clone(),
                amount_x: dx,
                amount_y: dy,
            },
            next.sync_event(),
        ];
        Ok((next, minted, events))
    }

    /// Burn pool shares and withdraw the proportional share of both reserves.
    pub fn remove_liquidity(
        &self,
        shares: u128,
        provider: &Address,
    ) -> Result<(PoolState, u128, u128, Vec<EventKind>), AmmError> {
        if shares == 0 {
            return Err(AmmError::ZeroAmount);
        }
        let held = self.lp_balances.get(provider).copied().unwrap_or(0);
        if held < shares || self.lp_total == 0 {
            return Err(AmmError::InsufficientShares(provider.clone()));
        }
        let dx = self
            .reserve_x
            .checked_mul(shares)
            .ok_or(AmmError::Overflow)?
            / self.lp_total;
        let dy = self
            .reserve_y
            .checked_mul(shares)
            .ok_or(AmmError::Overflow)?
            / self.lp_total;
        let mut next = self.clone();
        next.reserve_x -= dx;
        next.reserve_y -= dy;
        next.lp_total -= shares;
        *next
            .lp_balances
            .get_mut(provider)
            .expect("held checked above") -= shares;
        let events = vec![
            EventKind::Burn {
                provider: provider.clone(),
                amount_x: dx,
                amount_y: dy,
            },
            next.sync_event(),
        ];
        Ok((next, dx, dy, events))
    }

    fn sync_event(&self) -> EventKind {
        EventKind::Sync {
            token_x: self.token_x.clone(),
            reserve_x: self.reserve_x,
            token_y: self.token_y.clone(),
            reserve_y: self.reserve_y,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pool(rx: u128, ry: u128) -> PoolState {
        let mut p = PoolState::create_pair("0xtok".into(), "0xweth".into()).unwrap();
        p.reserve_x = rx;
        p.reserve_y = ry;
        p
    }

    #[test]
    fn quote_matches_worked_examples() {
        // Large pool: a 10_000 input against (1_000_000, 1_000_000).
        let q = pool(1_000_000, 1_000_000)
            .quote_swap(10_000, SwapSide::XInYOut)
            .unwrap();
        assert_eq!(q.amount_out, 9_871);
        assert_eq!(q.reserve_x_after, 1_010_000);
        assert_eq!(q.reserve_y_after, 990_129);

        // Doubling a tiny pool yields just under half the far reserve.
        let q = pool(1000, 1000)
            .quote_swap(1000, SwapSide::XInYOut)
            .unwrap();
        assert_eq!(q.amount_out, 499);
    }

    #[test]
    fn quote_rejects_degenerate_inputs() {
        assert_eq!(
            pool(1000, 1000).quote_swap(0, SwapSide::XInYOut),
            Err(AmmError::ZeroAmount)
        );
        assert_eq!(
            pool(0, 1000).quote_swap(5, SwapSide::XInYOut),
            Err(AmmError::EmptyReserve)
        );
        assert_eq!(
            PoolState::create_pair("0xsame".into(), "0xsame".into()),
            Err(AmmError::IdenticalTokens)
        );
    }

    #[test]
    fn executed_swap_keeps_fee_adjusted_product() {
        let p = pool(1_000_000, 1_000_000);
        let trader = Address::new("0xtrader");
        let (next, q, events) = p.execute_swap(10_000, SwapSide::XInYOut, &trader).unwrap();
        // (rx' * 1000 - dx * 3) * ry' >= rx * 1000 * ry, the integer form of
        // the fee-adjusted product bound.
        let lhs = (next.reserve_x * 1000 - 10_000 * 3) * next.reserve_y;
        let rhs = p.reserve_x * 1000 * p.reserve_y;
        assert!(lhs >= rhs);
        assert_eq!(q.amount_out, 9_871);
        assert_eq!(events.len(), 2);
        assert!(matches!(
            events[0],
            EventKind::Swap {
                amount_out: 9_871,
                ..
            }
        ));
        assert!(matches!(
            events[1],
            EventKind::Sync {
                reserve_x: 1_010_000,
                reserve_y: 990_129,
                ..
            }
        ));
        // The original pool value is untouched.
        assert_eq!(p.reserve_x, 1_000_000);
    }

    #[test]
    fn two_half_swaps_never_beat_one_full_swap() {
        let p = pool(1_000_000, 1_000_000);
        let trader = Address::new("0xtrader");
        let direct = p.quote_swap(10_000, SwapSide::XInYOut).unwrap().amount_out;
        let (mid, q1, _) = p.execute_swap(5_000, SwapSide::XInYOut, &trader).unwrap();
        let q2 = mid.quote_swap(5_000, SwapSide::XInYOut).unwrap();
        assert!(q1.amount_out + q2.amount_out <= direct);
    }

    #[test]
    fn amount_in_for_buys_at_least_the_target() {
        let p = pool(1_000_000, 500_000);
        for target in [1u128, 999, 1000, 123_456] {
            let dx = p.amount_in_for(target, SwapSide::XInYOut).unwrap();
            let q = p.quote_swap(dx, SwapSide::XInYOut).unwrap();
            assert!(
                q.amount_out >= target,
                "target {target}: got {}",
                q.amount_out
            );
        }
        assert_eq!(
            p.amount_in_for(500_000, SwapSide::XInYOut),
            Err(AmmError::OutputExceedsReserve)
        );
    }

    #[test]
    fn first_deposit_mints_geometric_mean() {
        let p = pool(0, 0);
        let lp = Address::new("0xlp");
        let (next, minted, events) = p.add_liquidity(400, 900, &lp).unwrap();
        assert_eq!(minted, 600);
        assert_eq!(next.lp_total, 600);
        assert_eq!(next.lp_balances[&lp], 600);
        assert!(matches!(
            events[0],
            EventKind::Mint {
                amount_x: 400,
                amount_y: 900,
                ..
            }
        ));
    }

    #[test]
    fn later_deposit_enforces_ratio_within_one_unit() {
        let lp = Address::new("0xlp");
        let (p, _, _) = pool(0, 0).add_liquidity(1000, 2000, &lp).unwrap();
        // Ideal dy for dx = 500 is 1000; one unit off is accepted.
        assert!(p.add_liquidity(500, 1001, &lp).is_ok());
        assert!(p.add_liquidity(500, 1000, &lp).is_ok());
        assert_eq!(
            p.add_liquidity(500, 1002, &lp).unwrap_err(),
            AmmError::RatioMismatch
        );
        // Proportional mint: lp_total * dx / reserve_x.
        let (next, minted, _) = p.add_liquidity(500, 1000, &lp).unwrap();
        assert_eq!(minted, p.lp_total * 500 / p.reserve_x);
        assert_eq!(next.lp_total, p.lp_total + minted);
    }

    #[test]
    fn removal_pays_proportional_share() {
        let lp = Address::new("0xlp");
        let (p, minted, _) = pool(0, 0).add_liquidity(400, 900, &lp).unwrap();
        let (next, dx, dy, events) = p.remove_liquidity(minted / 3, &lp).unwrap();
        assert_eq!(
            (dx, dy),
            (400 * (minted / 3) / minted, 900 * (minted / 3) / minted)
        );
        assert!(matches!(events[0], EventKind::Burn { .. }));
        assert_eq!(next.lp_total, minted - minted / 3);

        // Withdrawing every share returns the full deposits exactly.
        let (emptied, dx, dy, _) = p.remove_liquidity(minted, &lp).unwrap();
        assert_eq!((dx, dy), (400, 900));
        assert_eq!(emptied.lp_total, 0);
        assert_eq!(
            p.remove_liquidity(minted + 1, &lp).unwrap_err(),
            AmmError::InsufficientShares(lp.clone())
        );
    }

    #[test]
    fn isqrt_floors() {
        for (n, root) in [
            (0u128, 0u128),
            (1, 1),
            (2, 1),
            (3, 1),
            (4, 2),
            (360_000, 600),
        ] {
            assert_eq!(isqrt(n), root);
        }
        for n in [99u128, 100, 101, 2u128.pow(64) - 1, u128::MAX] {
            let r = isqrt(n);
            assert!(r * r <= n);
            assert!((r + 1).checked_mul(r + 1).map(|sq| sq > n).unwrap_or(true));
        }
    }
}
