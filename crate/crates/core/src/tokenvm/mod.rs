//! Executable ERC-20-style token machine with configurable sell traps.
//!
//! A [`TokenSpec`] describes a token and the traps wired into its transfer
//! path; [`TokenInstance::deploy`] turns it into live state. The five trap
//! families map onto [`TrapConfig`] fields:
//!
//! * permission — a white/blacklist consulted on sells,
//! * suspension — a global switch that halts trading,
//! * amount limit — a per-transfer cap,
//! * fee — buy/sell fees in basis points, burned to the token's own address,
//! * callback — a sell-triggered re-entry into `transfer` from the token
//!   address, which then trips the permission list.
//!
//! Transfers evaluate traps in a fixed order (callback, permission,
//! suspension, limit, fee) and fail atomically with an [`ErrorTrace`] whose
//! frames mirror where the trap was placed in the source (inline, behind a
//! modifier, nested helpers, or an external helper contract). The owner — and
//! a hidden co-owner left behind by an incomplete renouncement — is always
//! exempt, so the deployer can exit while investors cannot.

mod astgen;
mod bytegen;
mod synth;

pub use astgen::contract_ast;
pub use bytegen::bytecode_stub;
pub use synth::{
    sample_spec, synthesize_corpus, synthesize_corpus_with_fixtures, synthesize_mixed_corpus,
    SynthRecord, TokenFixtures, WELL_KNOWN_TOKENS,
};

use crate::events::EventKind;
use crate::types::Address;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// Trap categories a generated token can carry; benign tokens carry none.
/// Short names follow the common abbreviations for the five families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    #[serde(rename = "EP")]
    Permission,
    #[serde(rename = "ES")]
    Suspension,
    #[serde(rename = "AL")]
    AmountLimit,
    #[serde(rename = "FM")]
    FeeManipulation,
    #[serde(rename = "IC")]
    InvalidCallback,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Permission,
        Category::Suspension,
        Category::AmountLimit,
        Category::FeeManipulation,
        Category::InvalidCallback,
    ];

    pub fn short(&self) -> &'static str {
        match self {
            Category::Permission => "EP",
            Category::Suspension => "ES",
            Category::AmountLimit => "AL",
            Category::FeeManipulation => "FM",
            Category::InvalidCallback => "IC",
        }
    }

    pub fn from_short(s: &str) -> Option<Category> {
        Category::ALL.iter().copied().find(|c| c.short() == s)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ListKind {
    Whitelist,
    Blacklist,
}

/// Sell-side list check: whitelists require the seller to be a member,
/// blacklists require the opposite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermissionTrap {
    pub list_kind: ListKind,
    pub members: BTreeSet<Address>,
    pub identifier: String,
    pub has_setter: bool,
}

/// Global trading switch. With `suspend_buys` false, transfers out of the
/// pool (buys) stay open while everything else halts; with it true the
/// suspension covers both directions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuspensionTrap {
    /// True means trading is currently suspended.
    pub switch_value: bool,
    pub identifier: String,
    pub has_setter: bool,
    pub suspend_buys: bool,
}

/// Per-transfer amount cap. `sell_only` scopes the cap to pool-bound
/// transfers; otherwise every non-owner transfer is checked.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmountLimitTrap {
    pub limit: u128,
    pub identifier: String,
    pub has_setter: bool,
    pub sell_only: bool,
}

/// Buy/sell fees in basis points (10000 = 100%). Values above 10000 model the
/// deliberate-overflow variant: the fee math itself raises a numeric error.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeeTrap {
    pub buy_fee_bps: u32,
    pub sell_fee_bps: u32,
    pub identifier: String,
    pub has_setter: bool,
}

/// Sell-triggered re-entry: `transfer` calls back into itself with the token
/// address as sender, which the permission list then rejects.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallbackTrap {
    pub enabled: bool,
    pub identifier: String,
    pub reentry_function: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrapConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permission: Option<PermissionTrap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suspension: Option<SuspensionTrap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amount_limit: Option<AmountLimitTrap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fee: Option<FeeTrap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub callback: Option<CallbackTrap>,
}

impl TrapConfig {
    pub fn is_empty(&self) -> bool {
        self.permission.is_none()
            && self.suspension.is_none()
            && self.amount_limit.is_none()
            && self.fee.is_none()
            && self.callback.is_none()
    }
}

/// Tricks that hide a trap from casual review without changing what it does.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Concealment {
    /// Revert without a message; failure traces carry no identifier.
    BlankError,
    /// Trap variables named with a single character.
    SingleCharName,
    /// Trap variables named after innocuous things ("router", "balances1").
    MisleadingName,
    /// An unguarded, never-called initializer that appears to reset the trap.
    DummyFunction,
    /// Ownership renounced publicly while a hidden co-owner keeps control.
    IncompleteRenouncement,
    /// Fee set past 100% so the failure looks like an arithmetic bug.
    NumericException,
}

/// Where the trap check lives in the contract source, which shapes both the
/// paired AST fixture and the call frames of failure traces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    Inline,
    ViaModifier,
    ViaNestedFunction,
    ViaExternalContract,
}

/// Full description of a token: identity, supply, and trap wiring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSpec {
    pub id: Address,
    pub name: String,
    pub symbol: String,
    pub decimals: u8,
    pub total_supply: u128,
    pub owner: Address,
    pub traps: TrapConfig,
    #[serde(default)]
    pub concealment: BTreeSet<Concealment>,
    pub placement: Placement,
    /// Helper-chain depth for `ViaNestedFunction`; zero otherwise.
    #[serde(default)]
    pub nesting_depth: u8,
}

impl TokenSpec {
    /// A plain token with no traps, default placement, and an owner derived
    /// from the id.
    pub fn benign(
        id: impl Into<Address>,
        name: impl Into<String>,
        symbol: impl Into<String>,
        total_supply: u128,
    ) -> TokenSpec {
        let id = id.into();
        let owner = Address::new(format!("{id}:deployer"));
        TokenSpec {
            id,
            name: name.into(),
            symbol: symbol.into(),
            decimals: 18,
            total_supply,
            owner,
            traps: TrapConfig::default(),
            concealment: BTreeSet::new(),
            placement: Placement::Inline,
            nesting_depth: 0,
        }
    }

    pub fn conceals(&self, c: Concealment) -> bool {
        self.concealment.contains(&c)
    }

    /// Names of the call frames between the internal transfer and the trap
    /// check site, as dictated by the placement. The AST generator uses the
    /// same names, so static fixtures and runtime traces agree.
    pub fn placement_frames(&self) -> Vec<String> {
        match self.placement {
            Placement::Inline => vec![],
            Placement::ViaModifier => vec![MODIFIER_NAME.to_string()],
            Placement::ViaNestedFunction => (1..=self.nesting_depth.max(1))
                .map(|i| format!("{NESTED_HELPER_PREFIX}{i}"))
                .collect(),
            Placement::ViaExternalContract => {
                vec![format!(
                    "{EXTERNAL_CONTRACT_NAME}.{EXTERNAL_CHECK_FUNCTION}"
                )]
            }
        }
    }
}

/// Guard-modifier name used by `ViaModifier` placements.
pub const MODIFIER_NAME: &str = "checkedTransfer";
/// Helper-function prefix used by `ViaNestedFunction` placements.
pub const NESTED_HELPER_PREFIX: &str = "_transferStep";
/// Helper contract and entry point used by `ViaExternalContract` placements.
pub const EXTERNAL_CONTRACT_NAME: &str = "TransferHelper";
pub const EXTERNAL_CHECK_FUNCTION: &str = "check";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CauseKind {
    AssertionFailed,
    NumericOverflow,
    Reverted,
}

/// Terminal reason a transfer failed. `identifier` names the trap variable or
/// function that fired; it is empty under the blank-error concealment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cause {
    pub kind: CauseKind,
    pub identifier: String,
    pub message: String,
}

/// One call frame of a failure trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub function_name: String,
    pub site_id: u32,
}

/// Structured failure: the call frames leading to the revert plus its cause.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorTrace {
    pub frames: Vec<Frame>,
    pub cause: Cause,
}

impl ErrorTrace {
    /// Every identifier the trace exposes: the cause identifier plus all
    /// frame names, skipping blanks.
    pub fn visible_identifiers(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.cause.identifier.as_str())
            .chain(self.frames.iter().map(|f| f.function_name.as_str()))
            .filter(|s| !s.is_empty())
    }
}

/// Successful transfer: what the recipient was credited, and any fee diverted
/// to the burn sink. `fee_identifier` names the fee variable that charged it
/// (absent under blank-error concealment), which is what lets a later
/// crosscheck attribute an excessive observed fee to a specific indicator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferReceipt {
    pub delivered: u128,
    pub fee: u128,
    pub fee_identifier: Option<String>,
    /// Token `Transfer` payloads this call would log, nested effects included.
    pub events: Vec<EventKind>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BackdoorError {
    #[error("caller is not a current or hidden owner")]
    NotAuthorized,
    #[error("no trap of that kind is configured")]
    NoSuchTrap,
    #[error("the trap has no setter")]
    NoSetter,
}

/// Owner-only state changes behind the traps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum BackdoorAction {
    SetListMember {
        address: Address,
        present: bool,
    },
    SetSwitch {
        value: bool,
    },
    SetLimit {
        #[serde(with = "crate::types::dec_string")]
        limit: u128,
    },
    SetFee {
        buy_fee_bps: u32,
        sell_fee_bps: u32,
    },
}

/// Deployed token: live balances plus a live copy of the trap state that
/// backdoor calls may mutate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenInstance {
    pub spec: TokenSpec,
    pub balances: BTreeMap<Address, u128>,
    pub traps: TrapConfig,
    /// Current owner; `None` once ownership is renounced.
    pub owner: Option<Address>,
    /// Hidden co-owner kept by the incomplete-renouncement concealment.
    pub hidden_owner: Option<Address>,
}

/// Planned balance mutations for an atomically applied transfer.
struct Plan {
    debits: Vec<(Address, u128)>,
    credits: Vec<(Address, u128)>,
    receipt: TransferReceipt,
}

// Synthetic site ids for trace frames.
const SITE_TRANSFER: u32 = 0;
const SITE_TRANSFER_INTERNAL: u32 = 1;
const SITE_GUARD_BASE: u32 = 10;
const SITE_REENTRY: u32 = 30;

impl TokenInstance {
    /// Instantiate a spec: the owner holds the entire supply and the traps
    /// start in their configured state.
    pub fn deploy(spec: TokenSpec) -> TokenInstance {
        let mut balances = BTreeMap::new();
        balances.insert(spec.owner.clone(), spec.total_supply);
        let hidden_owner = spec
            .conceals(Concealment::IncompleteRenouncement)
            .then(|| Address::new(format!("{}:shadow", spec.owner)));
        TokenInstance {
            owner: Some(spec.owner.clone()),
            traps: spec.traps.clone(),
            hidden_owner,
            balances,
            spec,
        }
    }

    pub fn balance_of(&self, addr: &Address) -> u128 {
        self.balances.get(addr).copied().unwrap_or(0)
    }

    /// Owner or hidden co-owner: exempt from every trap and allowed through
    /// the backdoor.
    pub fn is_privileged(&self, addr: &Address) -> bool {
        self.owner.as_ref() == Some(addr) || self.hidden_owner.as_ref() == Some(addr)
    }

    /// Move `amount` from `from` to `to`, treating transfers into `pool` as
    /// sells and out of it as buys. Traps run in a fixed order — callback,
    /// permission, suspension, amount limit, fee — and the first failure wins.
    /// Failures roll back completely: balances are untouched on `Err`.
    pub fn transfer(
        &mut self,
        from: &Address,
        to: &Address,
        amount: u128,
        pool: &Address,
    ) -> Result<TransferReceipt, ErrorTrace> {
        let mut frames = Vec::new();
        let plan = match self.evaluate(from, to, amount, pool, false, &mut frames) {
            Ok(plan) => plan,
            Err(cause) => return Err(self.trace(frames, cause)),
        };
        for (addr, debit) in &plan.debits {
            let entry = self.balances.entry(addr.clone()).or_insert(0);
            *entry -= debit;
        }
        for (addr, credit) in &plan.credits {
            *self.balances.entry(addr.clone()).or_insert(0) += credit;
        }
        Ok(plan.receipt)
    }

    /// Trap evaluation against a snapshot of state; mutations are only
    /// planned, never applied here, which is what makes failures atomic.
    fn evaluate(
        &self,
        from: &Address,
        to: &Address,
        amount: u128,
        pool: &Address,
        in_callback: bool,
        frames: &mut Vec<Frame>,
    ) -> Result<Plan, Cause> {
        frames.push(Frame {
            function_name: "transfer".into(),
            site_id: SITE_TRANSFER,
        });
        frames.push(Frame {
            function_name: "_transfer".into(),
            site_id: SITE_TRANSFER_INTERNAL,
        });

        let is_sell = to == pool;
        let is_buy = from == pool;
        let privileged_from = self.is_privileged(from);
        let privileged_to = self.is_privileged(to);

        // Callback: a sell re-enters the transfer path with the token itself
        // as sender before anything else runs.
        let mut nested: Option<Plan> = None;
        if let Some(cb) = &self.traps.callback {
            if cb.enabled && is_sell && !in_callback && !privileged_from {
                frames.push(Frame {
                    function_name: cb.reentry_function.clone(),
                    site_id: SITE_REENTRY,
                });
                let inner = self.evaluate(&self.spec.id.clone(), to, amount, pool, true, frames)?;
                nested = Some(inner);
            }
        }

        // Guard checks sit behind the configured placement; record its frames.
        for (i, name) in self.spec.placement_frames().into_iter().enumerate() {
            frames.push(Frame {
                function_name: name,
                site_id: SITE_GUARD_BASE + i as u32,
            });
        }

        if let Some(p) = &self.traps.permission {
            if is_sell && !privileged_from {
                let member = p.members.contains(from);
                let blocked = match p.list_kind {
                    ListKind::Whitelist => !member,
                    ListKind::Blacklist => member,
                };
                if blocked {
                    let message = match p.list_kind {
                        ListKind::Whitelist => "sender is not enabled",
                        ListKind::Blacklist => "sender is blocked",
                    };
                    return Err(self.cause(CauseKind::AssertionFailed, &p.identifier, message));
                }
            }
        }

        if let Some(s) = &self.traps.suspension {
            let exempt_buy = is_buy && !s.suspend_buys;
            if s.switch_value && !privileged_from && !privileged_to && !exempt_buy {
                return Err(self.cause(
                    CauseKind::AssertionFailed,
                    &s.identifier,
                    "trading is suspended",
                ));
            }
        }

        if let Some(l) = &self.traps.amount_limit {
            let in_scope = !l.sell_only || is_sell;
            if amount > l.limit && !privileged_from && in_scope {
                return Err(self.cause(
                    CauseKind::AssertionFailed,
                    &l.identifier,
                    "amount exceeds the transfer limit",
                ));
            }
        }

        if self.balance_of(from) < amount {
            // Inside a callback the shortfall is the trap's doing: the token
            // address rarely holds a balance to re-send.
            let identifier = if in_callback {
                self.traps
                    .callback
                    .as_ref()
                    .map(|cb| cb.identifier.clone())
                    .unwrap_or_default()
            } else {
                String::new()
            };
            return Err(self.cause(
                CauseKind::Reverted,
                &identifier,
                "transfer amount exceeds balance",
            ));
        }

        let mut fee = 0u128;
        let mut fee_identifier = None;
        if let Some(f) = &self.traps.fee {
            let rate_bps = if is_sell && !privileged_from {
                f.sell_fee_bps
            } else if is_buy && !privileged_to {
                f.buy_fee_bps
            } else {
                0
            };
            if rate_bps > 10_000 {
                return Err(self.cause(
                    CauseKind::NumericOverflow,
                    &f.identifier,
                    "Integer overflow",
                ));
            }
            fee = amount * rate_bps as u128 / 10_000;
            if fee > 0 {
                fee_identifier = Some(f.identifier.clone());
            }
        }
        let delivered = amount - fee;

        let mut plan = Plan {
            debits: vec![(from.clone(), amount)],
            credits: vec![(to.clone(), delivered)],
            receipt: TransferReceipt {
                delivered,
                fee,
                fee_identifier: if self.spec.conceals(Concealment::BlankError) {
                    None
                } else {
                    fee_identifier
                },
                events: vec![EventKind::Transfer {
                    from: from.clone(),
                    to: to.clone(),
                    amount: delivered,
                }],
            },
        };
        if fee > 0 {
            // The fee is "burned" to the token's own address.
            plan.credits.push((self.spec.id.clone(), fee));
            plan.receipt.events.push(EventKind::Transfer {
                from: from.clone(),
                to: self.spec.id.clone(),
                amount: fee,
            });
        }
        if let Some(inner) = nested {
            plan.debits.extend(inner.debits);
            plan.credits.extend(inner.credits);
            let mut events = inner.receipt.events;
            events.extend(plan.receipt.events.drain(..));
            plan.receipt.events = events;
        }
        Ok(plan)
    }

    fn cause(&self, kind: CauseKind, identifier: &str, message: &str) -> Cause {
        if self.spec.conceals(Concealment::BlankError) {
            Cause {
                kind,
                identifier: String::new(),
                message: String::new(),
            }
        } else {
            Cause {
                kind,
                identifier: identifier.to_string(),
                message: message.to_string(),
            }
        }
    }

    fn trace(&self, mut frames: Vec<Frame>, cause: Cause) -> ErrorTrace {
        if self.spec.conceals(Concealment::BlankError) {
            // An opaque revert: the public entry frames survive, everything
            // behind them is swallowed.
            frames.truncate(2);
        }
        ErrorTrace { frames, cause }
    }

    /// Owner-only mutation of live trap state. Requires the matching trap to
    /// exist and to have been generated with a setter.
    pub fn invoke_backdoor(
        &mut self,
        caller: &Address,
        action: BackdoorAction,
    ) -> Result<(), BackdoorError> {
        if !self.is_privileged(caller) {
            return Err(BackdoorError::NotAuthorized);
        }
        match action {
            BackdoorAction::SetListMember { address, present } => {
                let trap = self
                    .traps
                    .permission
                    .as_mut()
                    .ok_or(BackdoorError::NoSuchTrap)?;
                if !trap.has_setter {
                    return Err(BackdoorError::NoSetter);
                }
                if present {
                    trap.members.insert(address);
                } else {
                    trap.members.remove(&address);
                }
            }
            BackdoorAction::SetSwitch { value } => {
                let trap = self
                    .traps
                    .suspension
                    .as_mut()
                    .ok_or(BackdoorError::NoSuchTrap)?;
                if !trap.has_setter {
                    return Err(BackdoorError::NoSetter);
                }
                trap.switch_value = value;
            }
            BackdoorAction::SetLimit { limit } => {
                let trap = self
                    .traps
                    .amount_limit
                    .as_mut()
                    .ok_or(BackdoorError::NoSuchTrap)?;
                if !trap.has_setter {
                    return Err(BackdoorError::NoSetter);
                }
                trap.limit = limit;
            }
            BackdoorAction::SetFee {
                buy_fee_bps,
                sell_fee_bps,
            } => {
                let trap = self.traps.fee.as_mut().ok_or(BackdoorError::NoSuchTrap)?;
                if !trap.has_setter {
                    return Err(BackdoorError::NoSetter);
                }
                trap.buy_fee_bps = buy_fee_bps;
                trap.sell_fee_bps = sell_fee_bps;
            }
        }
        Ok(())
    }

    /// Give up ownership. Under the incomplete-renouncement concealment the
    /// hidden co-owner keeps full control afterwards.
    pub fn renounce_ownership(&mut self, caller: &Address) -> Result<(), BackdoorError> {
        if self.owner.as_ref() != Some(caller) {
            return Err(BackdoorError::NotAuthorized);
        }
        self.owner = None;
        Ok(())
    }

    /// Total balance across all holders; conserved by every transfer.
    pub fn total_held(&self) -> u128 {
        self.balances.values().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_spec(traps: TrapConfig) -> TokenSpec {
        TokenSpec {
            id: "0xtoken".into(),
            name: "Sample".into(),
            symbol: "SMP".into(),
            decimals: 18,
            total_supply: 1_000_000,
            owner: "0xowner".into(),
            traps,
            concealment: BTreeSet::new(),
            placement: Placement::Inline,
            nesting_depth: 0,
        }
    }

    fn whitelist(members: &[&str]) -> TrapConfig {
        TrapConfig {
            permission: Some(PermissionTrap {
                list_kind: ListKind::Whitelist,
                members: members.iter().map(|m| Address::from(*m)).collect(),
                identifier: "_enable".into(),
                has_setter: false,
            }),
            ..TrapConfig::default()
        }
    }

    fn seeded(traps: TrapConfig) -> (TokenInstance, Address, Address) {
        let mut token = TokenInstance::deploy(base_spec(traps));
        let pool = Address::new("0xpool");
        let investor = Address::new("0xinvestor");
        let owner = Address::new("0xowner");
        token.transfer(&owner, &pool, 500_000, &pool).unwrap();
        token.transfer(&pool, &investor, 1_000, &pool).unwrap();
        (token, pool, investor)
    }

    #[test]
    fn plain_transfer_moves_balance() {
        let mut token = TokenInstance::deploy(base_spec(TrapConfig::default()));
        let owner = Address::new("0xowner");
        let alice = Address::new("0xalice");
        let pool = Address::new("0xpool");
        let receipt = token.transfer(&owner, &alice, 1_000, &pool).unwrap();
        assert_eq!(receipt.delivered, 1_000);
        assert_eq!(receipt.fee, 0);
        assert_eq!(token.balance_of(&alice), 1_000);
        assert_eq!(token.total_held(), 1_000_000);
    }

    #[test]
    fn whitelist_blocks_investor_sell_and_names_itself() {
        let (mut token, pool, investor) = seeded(whitelist(&["0xowner"]));
        let before = token.balances.clone();
        let err = token.transfer(&investor, &pool, 500, &pool).unwrap_err();
        assert_eq!(err.cause.kind, CauseKind::AssertionFailed);
        assert_eq!(err.cause.identifier, "_enable");
        assert_eq!(err.frames[0].function_name, "transfer");
        // Atomic rollback: nothing moved.
        assert_eq!(token.balances, before);
        // Transfers that are not sells pass the permission check.
        assert!(token
            .transfer(&investor, &Address::new("0xbob"), 10, &pool)
            .is_ok());
    }

    #[test]
    fn blacklist_blocks_listed_sellers_only() {
        let trap = TrapConfig {
            permission: Some(PermissionTrap {
                list_kind: ListKind::Blacklist,
                members: [Address::new("0xinvestor")].into(),
                identifier: "_isBot".into(),
                has_setter: true,
            }),
            ..TrapConfig::default()
        };
        let (mut token, pool, investor) = seeded(trap);
        let err = token.transfer(&investor, &pool, 100, &pool).unwrap_err();
        assert_eq!(err.cause.identifier, "_isBot");
        // A clean address sells fine.
        token
            .transfer(&pool, &Address::new("0xclean"), 100, &pool)
            .unwrap();
        assert!(token
            .transfer(&Address::new("0xclean"), &pool, 50, &pool)
            .is_ok());
    }

    #[test]
    fn suspension_scopes_follow_the_switch() {
        let trap = |suspend_buys| TrapConfig {
            suspension: Some(SuspensionTrap {
                switch_value: true,
                identifier: "enableTrading".into(),
                has_setter: true,
                suspend_buys,
            }),
            ..TrapConfig::default()
        };
        // Default scope: buys (from the pool) stay open, sells do not.
        let mut token = TokenInstance::deploy(base_spec(trap(false)));
        let (owner, pool, investor) = (
            Address::new("0xowner"),
            Address::new("0xpool"),
            Address::new("0xinvestor"),
        );
        token.transfer(&owner, &pool, 500_000, &pool).unwrap();
        token.transfer(&pool, &investor, 1_000, &pool).unwrap();
        let err = token.transfer(&investor, &pool, 100, &pool).unwrap_err();
        assert_eq!(err.cause.identifier, "enableTrading");
        // Peer-to-peer is also halted.
        assert!(token
            .transfer(&investor, &Address::new("0xbob"), 1, &pool)
            .is_err());

        // Full scope: even buys fail.
        let mut token = TokenInstance::deploy(base_spec(trap(true)));
        token.transfer(&owner, &pool, 500_000, &pool).unwrap();
        assert!(token.transfer(&pool, &investor, 1_000, &pool).is_err());
        // From/to the owner always passes.
        assert!(token.transfer(&owner, &investor, 10, &pool).is_ok());
        assert!(token.transfer(&investor, &owner, 5, &pool).is_ok());
    }

    #[test]
    fn amount_limit_checks_scope_and_exempts_owner() {
        let trap = |sell_only| TrapConfig {
            amount_limit: Some(AmountLimitTrap {
                limit: 100,
                identifier: "_maxTxAmount".into(),
                has_setter: true,
                sell_only,
            }),
            ..TrapConfig::default()
        };
        // Cap on every transfer: a large buy fails too.
        let mut token = TokenInstance::deploy(base_spec(trap(false)));
        let (owner, pool, investor) = (
            Address::new("0xowner"),
            Address::new("0xpool"),
            Address::new("0xinvestor"),
        );
        token.transfer(&owner, &pool, 500_000, &pool).unwrap();
        let err = token.transfer(&pool, &investor, 1_000, &pool).unwrap_err();
        assert_eq!(err.cause.identifier, "_maxTxAmount");
        assert!(token.transfer(&pool, &investor, 100, &pool).is_ok());

        // Sell-only cap: the buy passes, the oversized sell fails.
        let mut token = TokenInstance::deploy(base_spec(trap(true)));
        token.transfer(&owner, &pool, 500_000, &pool).unwrap();
        token.transfer(&pool, &investor, 1_000, &pool).unwrap();
        assert!(token.transfer(&investor, &pool, 101, &pool).is_err());
        assert!(token.transfer(&investor, &pool, 100, &pool).is_ok());
        // The owner is never capped.
        assert!(token.transfer(&owner, &pool, 400_000, &pool).is_ok());
    }

    #[test]
    fn sell_fee_burns_to_the_token_address() {
        let trap = TrapConfig {
            fee: Some(FeeTrap {
                buy_fee_bps: 0,
                sell_fee_bps: 9_900,
                identifier: "sellmktFee".into(),
                has_setter: true,
            }),
            ..TrapConfig::default()
        };
        let (mut token, pool, investor) = seeded(trap);
        let receipt = token.transfer(&investor, &pool, 1_000, &pool).unwrap();
        assert_eq!(receipt.fee, 990);
        assert_eq!(receipt.delivered, 10);
        assert_eq!(receipt.fee_identifier.as_deref(), Some("sellmktFee"));
        assert_eq!(token.balance_of(&Address::new("0xtoken")), 990);
        assert_eq!(token.total_held(), 1_000_000);
        assert_eq!(receipt.events.len(), 2);
    }

    #[test]
    fn fee_past_hundred_percent_raises_numeric_overflow() {
        let trap = TrapConfig {
            fee: Some(FeeTrap {
                buy_fee_bps: 0,
                sell_fee_bps: 11_000,
                identifier: "totalSellTax".into(),
                has_setter: true,
            }),
            ..TrapConfig::default()
        };
        let (mut token, pool, investor) = seeded(trap);
        let err = token.transfer(&investor, &pool, 100, &pool).unwrap_err();
        assert_eq!(err.cause.kind, CauseKind::NumericOverflow);
        assert_eq!(err.cause.identifier, "totalSellTax");
        assert_eq!(err.cause.message, "Integer overflow");
        // The overflow never fires for the owner.
        assert!(token
            .transfer(&Address::new("0xowner"), &pool, 100, &pool)
            .is_ok());
    }

    #[test]
    fn callback_reentry_trips_the_blacklist() {
        let trap = TrapConfig {
            permission: Some(PermissionTrap {
                list_kind: ListKind::Blacklist,
                members: [Address::new("0xtoken")].into(),
                identifier: "_isBot".into(),
                has_setter: true,
            }),
            callback: Some(CallbackTrap {
                enabled: true,
                identifier: "_isBot".into(),
                reentry_function: "burnToken".into(),
            }),
            ..TrapConfig::default()
        };
        let (mut token, pool, investor) = seeded(trap);
        let err = token.transfer(&investor, &pool, 400, &pool).unwrap_err();
        // The re-entered transfer fails the blacklist check against the token
        // address, and the reentry function shows up as a frame.
        assert_eq!(err.cause.identifier, "_isBot");
        let frame_names: Vec<_> = err
            .frames
            .iter()
            .map(|f| f.function_name.as_str())
            .collect();
        assert!(frame_names.contains(&"burnToken"));
        // Frames after the reentry belong to the nested transfer invocation.
        let reentry_at = frame_names.iter().position(|n| *n == "burnToken").unwrap();
        assert_eq!(frame_names[reentry_at + 1], "transfer");
        // The owner still exits freely.
        assert!(token
            .transfer(&Address::new("0xowner"), &pool, 1_000, &pool)
            .is_ok());
    }

    #[test]
    fn placement_shapes_the_trace_frames() {
        let mut spec = base_spec(whitelist(&["0xowner"]));
        spec.placement = Placement::ViaNestedFunction;
        spec.nesting_depth = 3;
        let mut token = TokenInstance::deploy(spec);
        let (owner, pool, investor) = (
            Address::new("0xowner"),
            Address::new("0xpool"),
            Address::new("0xinvestor"),
        );
        token.transfer(&owner, &pool, 500_000, &pool).unwrap();
        token.transfer(&pool, &investor, 1_000, &pool).unwrap();
        let err = token.transfer(&investor, &pool, 100, &pool).unwrap_err();
        let names: Vec<_> = err.frames.iter().map(|f| f.function_name.clone()).collect();
        assert_eq!(
            names,
            vec![
                "transfer",
                "_transfer",
                "_transferStep1",
                "_transferStep2",
                "_transferStep3"
            ]
        );
    }

    #[test]
    fn blank_error_redacts_cause_and_inner_frames() {
        let mut spec = base_spec(whitelist(&["0xowner"]));
        spec.placement = Placement::ViaModifier;
        spec.concealment.insert(Concealment::BlankError);
        let mut token = TokenInstance::deploy(spec);
        let (owner, pool, investor) = (
            Address::new("0xowner"),
            Address::new("0xpool"),
            Address::new("0xinvestor"),
        );
        token.transfer(&owner, &pool, 500_000, &pool).unwrap();
        token.transfer(&pool, &investor, 1_000, &pool).unwrap();
        let err = token.transfer(&investor, &pool, 100, &pool).unwrap_err();
        assert_eq!(err.cause.identifier, "");
        assert_eq!(err.cause.message, "");
        let names: Vec<_> = err.frames.iter().map(|f| f.function_name.clone()).collect();
        assert_eq!(names, vec!["transfer", "_transfer"]);
    }

    #[test]
    fn owner_can_always_exit_under_every_trap() {
        let owner = Address::new("0xowner");
        let pool = Address::new("0xpool");
        let configs = [
            whitelist(&[]),
            TrapConfig {
                suspension: Some(SuspensionTrap {
                    switch_value: true,
                    identifier: "sw".into(),
                    has_setter: true,
                    suspend_buys: true,
                }),
                ..TrapConfig::default()
            },
            TrapConfig {
                amount_limit: Some(AmountLimitTrap {
                    limit: 0,
                    identifier: "cap".into(),
                    has_setter: true,
                    sell_only: false,
                }),
                ..TrapConfig::default()
            },
            TrapConfig {
                fee: Some(FeeTrap {
                    buy_fee_bps: 20_000,
                    sell_fee_bps: 20_000,
                    identifier: "tax".into(),
                    has_setter: true,
                }),
                ..TrapConfig::default()
            },
            TrapConfig {
                permission: Some(PermissionTrap {
                    list_kind: ListKind::Blacklist,
                    members: [Address::new("0xtoken"), Address::new("0xowner")].into(),
                    identifier: "bots".into(),
                    has_setter: true,
                }),
                callback: Some(CallbackTrap {
                    enabled: true,
                    identifier: "bots".into(),
                    reentry_function: "swapBack".into(),
                }),
                ..TrapConfig::default()
            },
        ];
        for traps in configs {
            let mut token = TokenInstance::deploy(base_spec(traps));
            let receipt = token.transfer(&owner, &pool, 123_456, &pool).unwrap();
            assert_eq!(
                receipt.delivered, 123_456,
                "owner exit must be fee-free and allowed"
            );
        }
    }

    #[test]
    fn backdoor_requires_privilege_setter_and_trap() {
        let (mut token, pool, investor) = seeded(whitelist(&["0xowner"]));
        let owner = Address::new("0xowner");
        // Permission trap above was built without a setter.
        assert_eq!(
            token.invoke_backdoor(
                &owner,
                BackdoorAction::SetListMember {
                    address: investor.clone(),
                    present: true
                }
            ),
            Err(BackdoorError::NoSetter)
        );
        assert_eq!(
            token.invoke_backdoor(&investor, BackdoorAction::SetSwitch { value: true }),
            Err(BackdoorError::NotAuthorized)
        );
        assert_eq!(
            token.invoke_backdoor(&owner, BackdoorAction::SetLimit { limit: 5 }),
            Err(BackdoorError::NoSuchTrap)
        );
        // With a setter, membership updates take effect on the next sell.
        token.traps.permission.as_mut().unwrap().has_setter = true;
        token
            .invoke_backdoor(
                &owner,
                BackdoorAction::SetListMember {
                    address: investor.clone(),
                    present: true,
                },
            )
            .unwrap();
        assert!(token.transfer(&investor, &pool, 10, &pool).is_ok());
    }

    #[test]
    fn hidden_owner_survives_renouncement() {
        let mut spec = base_spec(TrapConfig {
            fee: Some(FeeTrap {
                buy_fee_bps: 0,
                sell_fee_bps: 100,
                identifier: "fee".into(),
                has_setter: true,
            }),
            ..TrapConfig::default()
        });
        spec.concealment.insert(Concealment::IncompleteRenouncement);
        let mut token = TokenInstance::deploy(spec);
        let owner = Address::new("0xowner");
        let shadow = token.hidden_owner.clone().unwrap();
        token.renounce_ownership(&owner).unwrap();
        // The public owner is gone ...
        assert_eq!(
            token.invoke_backdoor(
                &owner,
                BackdoorAction::SetFee {
                    buy_fee_bps: 0,
                    sell_fee_bps: 9_900
                }
            ),
            Err(BackdoorError::NotAuthorized)
        );
        // ... but the hidden co-owner still reaches the backdoor.
        token
            .invoke_backdoor(
                &shadow,
                BackdoorAction::SetFee {
                    buy_fee_bps: 0,
                    sell_fee_bps: 9_900,
                },
            )
            .unwrap();
        assert_eq!(token.traps.fee.as_ref().unwrap().sell_fee_bps, 9_900);
    }

    #[test]
    fn insufficient_balance_reverts_without_moving_funds() {
        let mut token = TokenInstance::deploy(base_spec(TrapConfig::default()));
        let pool = Address::new("0xpool");
        let err = token
            .transfer(&Address::new("0xnobody"), &Address::new("0xbob"), 1, &pool)
            .unwrap_err();
        assert_eq!(err.cause.kind, CauseKind::Reverted);
        assert_eq!(err.cause.identifier, "");
        assert_eq!(token.total_held(), 1_000_000);
    }
}
