//! Deterministic synthetic token generation.
//!
//! `synthesize_corpus` produces a seed-reproducible mix of armed trapdoor
//! tokens (a configurable count per trap category) and benign tokens. Each
//! armed token carries exactly one primary category; callback tokens also
//! carry the blacklist their callback trips, but their ground truth stays
//! `{InvalidCallback}` because that is the only mechanism an investor can hit.
//!
//! Identifier names are drawn from small pools of naming styles seen in the
//! wild — descriptive, misleading ("router", "balances1"), or single-letter —
//! with the latter two tied to the matching concealment flags.

use super::{
    bytecode_stub, contract_ast, AmountLimitTrap, CallbackTrap, Category, Concealment, FeeTrap,
    ListKind, PermissionTrap, Placement, SuspensionTrap, TokenSpec, TrapConfig,
};
use crate::types::Address;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

/// Static artifacts paired with a synthesized token: the contract AST the
/// semantic analyzer reads and the runtime bytecode the classifier features
/// come from.
#[derive(Clone, Debug, PartialEq)]
pub struct TokenFixtures {
    pub ast: serde_json::Value,
    pub bytecode_hex: String,
}

/// One synthesized token with its ground truth and static fixtures.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthRecord {
    pub spec: TokenSpec,
    /// Ground-truth trap categories; empty for benign tokens.
    pub categories: BTreeSet<Category>,
    pub fixtures: TokenFixtures,
}

/// Real high-profile token identities that scam tokens imitate.
pub const WELL_KNOWN_TOKENS: &[(&str, &str)] = &[
    ("Tether USD", "USDT"),
    ("USD Coin", "USDC"),
    ("Wrapped Ether", "WETH"),
    ("BNB", "BNB"),
    ("Dai Stablecoin", "DAI"),
    ("Uniswap", "UNI"),
    ("ChainLink Token", "LINK"),
    ("Wrapped BTC", "WBTC"),
];

const NAME_HEADS: &[&str] = &[
    "Moon", "Safe", "Baby", "Elon", "Rocket", "Shiba", "Floki", "Turbo", "Mega", "Pepe", "Doge",
    "Lucky", "Golden", "Hyper", "Magic",
];
const NAME_TAILS: &[&str] = &[
    "Inu", "Coin", "Token", "Swap", "Cash", "Finance", "Rise", "Mars", "Gem", "King",
];

const PERMISSION_IDS: &[&str] = &[
    "whitelisted",
    "_included",
    "sellAllowed",
    "approvedTraders",
    "_safeHolders",
];
const SUSPENSION_IDS: &[&str] = &["paused", "tradingOpen", "swapEnabled", "inSwap", "canTrade"];
const LIMIT_IDS: &[&str] = &[
    "_maxTxAmount",
    "maxSellAmount",
    "_maxWalletSize",
    "txLimit",
    "maxTransfer",
];
const FEE_IDS: &[&str] = &[
    "_taxFee",
    "sellFee",
    "_liquidityFee",
    "burnFee",
    "_marketingTax",
];
const REENTRY_IDS: &[&str] = &[
    "burnToken",
    "reflectFee",
    "swapBack",
    "autoBurn",
    "_takeLiquidity",
];
const CALLBACK_LIST_IDS: &[&str] = &["botList", "bots", "_isSniper", "blockedBots"];
const MISLEADING_IDS: &[&str] = &[
    "router",
    "balances1",
    "_allowances2",
    "rewardPool",
    "lpPair",
];
const SINGLE_CHAR_IDS: &[&str] = &["a", "b", "c", "m", "q", "x", "y", "z"];

fn pick<'a>(rng: &mut ChaCha8Rng, pool: &'a [&'a str]) -> &'a str {
    pool[rng.gen_range(0..pool.len())]
}

fn identifier_for(
    rng: &mut ChaCha8Rng,
    concealment: &BTreeSet<Concealment>,
    pool: &[&str],
) -> String {
    if concealment.contains(&Concealment::SingleCharName) {
        pick(rng, SINGLE_CHAR_IDS).to_string()
    } else if concealment.contains(&Concealment::MisleadingName) {
        pick(rng, MISLEADING_IDS).to_string()
    } else {
        pick(rng, pool).to_string()
    }
}

fn sample_placement(rng: &mut ChaCha8Rng) -> (Placement, u8) {
    match rng.gen_range(0..4u8) {
        0 => (Placement::Inline, 0),
        1 => (Placement::ViaModifier, 0),
        2 => (Placement::ViaNestedFunction, rng.gen_range(1..=4)),
        _ => (Placement::ViaExternalContract, 0),
    }
}

fn sample_concealment(rng: &mut ChaCha8Rng, category: Category) -> BTreeSet<Concealment> {
    let mut set = BTreeSet::new();
    if rng.gen_bool(0.15) {
        set.insert(Concealment::MisleadingName);
    } else if rng.gen_bool(0.10) {
        set.insert(Concealment::SingleCharName);
    }
    if rng.gen_bool(0.15) {
        set.insert(Concealment::DummyFunction);
    }
    if rng.gen_bool(0.15) {
        set.insert(Concealment::IncompleteRenouncement);
    }
    if category == Category::FeeManipulation && rng.gen_bool(0.25) {
        // The overflow variant replaces the visible-fee variant outright.
        set.insert(Concealment::NumericException);
    } else if rng.gen_bool(0.10) {
        set.insert(Concealment::BlankError);
    }
    set
}

fn sample_name(rng: &mut ChaCha8Rng, fake: bool) -> (String, String) {
    if fake {
        let (n, s) = WELL_KNOWN_TOKENS[rng.gen_range(0..WELL_KNOWN_TOKENS.len())];
        return (n.to_string(), s.to_string());
    }
    let head = pick(rng, NAME_HEADS);
    let tail = pick(rng, NAME_TAILS);
    let name = format!("{head} {tail}");
    let symbol: String = format!("{}{}", &head[..1.min(head.len())], tail)
        .chars()
        .filter(|c| c.is_ascii_alphabetic())
        .take(5)
        .collect::<String>()
        .to_ascii_uppercase();
    (name, symbol)
}

/// Canonical armed spec for a category at a given placement — fixed values,
/// no randomness. This is the building block for placement-matrix checks.
pub fn sample_spec(category: Category, placement: Placement, nesting_depth: u8) -> TokenSpec {
    let id = Address::new(format!("0xfixture-{}", category.short()));
    let owner = Address::new(format!("{id}:deployer"));
    let traps = match category {
        Category::Permission => TrapConfig {
            permission: Some(PermissionTrap {
                list_kind: ListKind::Whitelist,
                members: BTreeSet::from([owner.clone()]),
                identifier: "whitelisted".into(),
                has_setter: true,
            }),
            ..TrapConfig::default()
        },
        Category::Suspension => TrapConfig {
            suspension: Some(SuspensionTrap {
                switch_value: true,
                identifier: "paused".into(),
                has_setter: true,
                suspend_buys: false,
            }),
            ..TrapConfig::default()
        },
        Category::AmountLimit => TrapConfig {
            amount_limit: Some(AmountLimitTrap {
                limit: 100,
                identifier: "_maxTxAmount".into(),
                has_setter: true,
                sell_only: true,
            }),
            ..TrapConfig::default()
        },
        Category::FeeManipulation => TrapConfig {
            fee: Some(FeeTrap {
                buy_fee_bps: 200,
                sell_fee_bps: 4000,
                identifier: "sellFee".into(),
                has_setter: true,
            }),
            ..TrapConfig::default()
        },
        Category::InvalidCallback => TrapConfig {
            callback: Some(CallbackTrap {
                enabled: true,
                identifier: "burnToken".into(),
                reentry_function: "burnToken".into(),
            }),
            permission: Some(PermissionTrap {
                list_kind: ListKind::Blacklist,
                members: BTreeSet::from([id.clone()]),
                identifier: "botList".into(),
                has_setter: true,
            }),
            ..TrapConfig::default()
        },
    };
    TokenSpec {
        id,
        name: "Sample Token".into(),
        symbol: "SMPL".into(),
        decimals: 18,
        total_supply: 1_000_000,
        owner,
        traps,
        concealment: BTreeSet::new(),
        placement,
        nesting_depth,
    }
}

fn armed_spec(
    rng: &mut ChaCha8Rng,
    idx: usize,
    category: Category,
) -> (TokenSpec, BTreeSet<Category>) {
    let id = Address::new(format!("0xsyn{idx:05}"));
    let owner = Address::new(format!("{id}:deployer"));
    let (placement, nesting_depth) = sample_placement(rng);
    let concealment = sample_concealment(rng, category);
    let external = matches!(placement, Placement::ViaExternalContract);

    let traps = match category {
        Category::Permission => TrapConfig {
            permission: Some(PermissionTrap {
                list_kind: ListKind::Whitelist,
                members: BTreeSet::from([owner.clone()]),
                identifier: identifier_for(rng, &concealment, PERMISSION_IDS),
                // Without a setter the analyzer leans on the constructor-only
                // whitelist arm, which needs the list in the main contract.
                has_setter: rng.gen_bool(0.7) || external,
            }),
            ..TrapConfig::default()
        },
        Category::Suspension => TrapConfig {
            suspension: Some(SuspensionTrap {
                switch_value: true,
                identifier: identifier_for(rng, &concealment, SUSPENSION_IDS),
                has_setter: true,
                suspend_buys: rng.gen_bool(0.25),
            }),
            ..TrapConfig::default()
        },
        Category::AmountLimit => TrapConfig {
            amount_limit: Some(AmountLimitTrap {
                limit: rng.gen_range(1..=400),
                identifier: identifier_for(rng, &concealment, LIMIT_IDS),
                has_setter: true,
                sell_only: rng.gen_bool(0.5),
            }),
            ..TrapConfig::default()
        },
        Category::FeeManipulation => {
            let sell_fee_bps = if concealment.contains(&Concealment::NumericException) {
                rng.gen_range(12_000..=30_000)
            } else {
                // Comfortably past the 30% acceptable-fee threshold.
                rng.gen_range(3_300..=9_000)
            };
            TrapConfig {
                fee: Some(FeeTrap {
                    buy_fee_bps: rng.gen_range(0..=500),
                    sell_fee_bps,
                    identifier: identifier_for(rng, &concealment, FEE_IDS),
                    has_setter: true,
                }),
                ..TrapConfig::default()
            }
        }
        Category::InvalidCallback => {
            let reentry: String = pick(rng, REENTRY_IDS).to_string();
            TrapConfig {
                callback: Some(CallbackTrap {
                    enabled: true,
                    identifier: reentry.clone(),
                    reentry_function: reentry,
                }),
                permission: Some(PermissionTrap {
                    list_kind: ListKind::Blacklist,
                    members: BTreeSet::from([id.clone()]),
                    identifier: identifier_for(rng, &concealment, CALLBACK_LIST_IDS),
                    has_setter: true,
                }),
                ..TrapConfig::default()
            }
        }
    };

    let fake = rng.gen_bool(0.08);
    let (name, symbol) = sample_name(rng, fake);
    let spec = TokenSpec {
        id,
        name,
        symbol,
        decimals: if rng.gen_bool(0.2) { 9 } else { 18 },
        total_supply: rng.gen_range(1_000_000..=1_000_000_000),
        owner,
        traps,
        concealment,
        placement,
        nesting_depth,
    };
    (spec, BTreeSet::from([category]))
}

fn benign_spec(rng: &mut ChaCha8Rng, idx: usize) -> TokenSpec {
    let (name, symbol) = sample_name(rng, false);
    let mut spec = TokenSpec::benign(
        format!("0xsyn{idx:05}"),
        name,
        symbol,
        rng.gen_range(1_000_000..=1_000_000_000),
    );
    spec.decimals = if rng.gen_bool(0.2) { 9 } else { 18 };
    spec
}

fn generate(
    seed: u64,
    armed_per_category: usize,
    benign_count: usize,
) -> Vec<(TokenSpec, BTreeSet<Category>, u64)> {
    let counts = Category::ALL
        .into_iter()
        .map(|c| (c, armed_per_category))
        .collect();
    generate_mixed(seed, &counts, benign_count)
}

fn generate_mixed(
    seed: u64,
    armed_counts: &BTreeMap<Category, usize>,
    benign_count: usize,
) -> Vec<(TokenSpec, BTreeSet<Category>, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let armed_total: usize = armed_counts.values().sum();
    let mut out = Vec::with_capacity(armed_total + benign_count);
    let mut idx = 0usize;
    for category in Category::ALL {
        for _ in 0..armed_counts.get(&category).copied().unwrap_or(0) {
            let (spec, cats) = armed_spec(&mut rng, idx, category);
            let fixture_seed = rng.gen::<u64>();
            out.push((spec, cats, fixture_seed));
            idx += 1;
        }
    }
    for _ in 0..benign_count {
        let spec = benign_spec(&mut rng, idx);
        let fixture_seed = rng.gen::<u64>();
        out.push((spec, BTreeSet::new(), fixture_seed));
        idx += 1;
    }
    out
}

/// Seed-reproducible corpus: `armed_per_category` tokens for each of the five
/// categories (traps armed), then `benign_count` tokens with no traps.
pub fn synthesize_corpus(
    seed: u64,
    armed_per_category: usize,
    benign_count: usize,
) -> Vec<(TokenSpec, BTreeSet<Category>)> {
    generate(seed, armed_per_category, benign_count)
        .into_iter()
        .map(|(spec, cats, _)| (spec, cats))
        .collect()
}

/// Same corpus with static fixtures (AST + bytecode stub) attached.
pub fn synthesize_corpus_with_fixtures(
    seed: u64,
    armed_per_category: usize,
    benign_count: usize,
) -> Vec<SynthRecord> {
    generate(seed, armed_per_category, benign_count)
        .into_iter()
        .map(attach_fixtures)
        .collect()
}

/// Corpus with an explicit armed count per category (absent categories produce
/// no tokens), fixtures attached. Categories are always emitted in `ALL`
/// order, so equal seeds and counts give byte-identical corpora.
pub fn synthesize_mixed_corpus(
    seed: u64,
    armed_counts: &BTreeMap<Category, usize>,
    benign_count: usize,
) -> Vec<SynthRecord> {
    generate_mixed(seed, armed_counts, benign_count)
        .into_iter()
        .map(attach_fixtures)
        .collect()
}

fn attach_fixtures(
    (spec, categories, fixture_seed): (TokenSpec, BTreeSet<Category>, u64),
) -> SynthRecord {
    let fixtures = TokenFixtures {
        ast: contract_ast(&spec),
        bytecode_hex: bytecode_stub(&spec, fixture_seed),
    };
    SynthRecord {
        spec,
        categories,
        fixtures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_corpus_honours_per_category_counts() {
        let counts = BTreeMap::from([(Category::Permission, 3), (Category::FeeManipulation, 1)]);
        let corpus = synthesize_mixed_corpus(11, &counts, 4);
        assert_eq!(corpus.len(), 3 + 1 + 4);
        let n = |cat| {
            corpus
                .iter()
                .filter(|r| r.categories.contains(&cat))
                .count()
        };
        assert_eq!(n(Category::Permission), 3);
        assert_eq!(n(Category::FeeManipulation), 1);
        assert_eq!(n(Category::Suspension), 0);
        assert_eq!(corpus.iter().filter(|r| r.categories.is_empty()).count(), 4);

        // Uniform counts reproduce the classic generator byte for byte.
        let uniform = BTreeMap::from_iter(Category::ALL.map(|c| (c, 2)));
        let mixed = synthesize_mixed_corpus(5, &uniform, 3);
        let classic = synthesize_corpus_with_fixtures(5, 2, 3);
        assert_eq!(mixed, classic);
    }

    #[test]
    fn corpus_is_deterministic_per_seed() {
        let a = synthesize_corpus(42, 10, 20);
        let b = synthesize_corpus(42, 10, 20);
        assert_eq!(a, b);
        let c = synthesize_corpus(43, 10, 20);
        assert_ne!(a, c);
    }

    #[test]
    fn corpus_counts_and_ground_truth_match() {
        let corpus = synthesize_corpus(7, 4, 9);
        assert_eq!(corpus.len(), 4 * Category::ALL.len() + 9);
        for category in Category::ALL {
            let n = corpus
                .iter()
                .filter(|(_, cats)| cats.contains(&category))
                .count();
            assert_eq!(n, 4, "{category} count");
        }
        let benign = corpus.iter().filter(|(s, _)| s.traps.is_empty()).count();
        assert_eq!(benign, 9);
        for (spec, cats) in &corpus {
            assert_eq!(spec.traps.is_empty(), cats.is_empty());
        }
    }

    #[test]
    fn armed_specs_are_actually_armed() {
        for (spec, cats) in synthesize_corpus(3, 6, 0) {
            match cats.iter().next().expect("armed") {
                Category::Permission => {
                    let p = spec.traps.permission.as_ref().unwrap();
                    assert_eq!(p.list_kind, ListKind::Whitelist);
                    assert!(p.members.contains(&spec.owner));
                }
                Category::Suspension => {
                    assert!(spec.traps.suspension.as_ref().unwrap().switch_value);
                }
                Category::AmountLimit => {
                    let l = spec.traps.amount_limit.as_ref().unwrap();
                    assert!(l.limit >= 1 && l.limit <= 400);
                }
                Category::FeeManipulation => {
                    let f = spec.traps.fee.as_ref().unwrap();
                    if spec.conceals(Concealment::NumericException) {
                        assert!(f.sell_fee_bps > 10_000);
                    } else {
                        assert!(f.sell_fee_bps > 3_000 && f.sell_fee_bps <= 10_000);
                    }
                }
                Category::InvalidCallback => {
                    assert!(spec.traps.callback.as_ref().unwrap().enabled);
                    let p = spec.traps.permission.as_ref().unwrap();
                    assert_eq!(p.list_kind, ListKind::Blacklist);
                    assert!(p.members.contains(&spec.id));
                    assert!(p.has_setter);
                }
            }
        }
    }

    #[test]
    fn external_permission_tokens_always_get_a_setter() {
        for (spec, _) in synthesize_corpus(11, 40, 0) {
            if let Some(p) = &spec.traps.permission {
                if matches!(spec.placement, Placement::ViaExternalContract)
                    && spec.traps.callback.is_none()
                {
                    assert!(p.has_setter);
                }
            }
        }
    }

    #[test]
    fn numeric_exception_never_pairs_with_blank_error() {
        for (spec, _) in synthesize_corpus(5, 60, 0) {
            assert!(
                !(spec.conceals(Concealment::NumericException)
                    && spec.conceals(Concealment::BlankError)),
                "incompatible concealments on {}",
                spec.id
            );
        }
    }

    #[test]
    fn fixtures_ride_along_with_the_same_specs() {
        let plain = synthesize_corpus(9, 2, 3);
        let rich = synthesize_corpus_with_fixtures(9, 2, 3);
        assert_eq!(plain.len(), rich.len());
        for ((spec, cats), record) in plain.iter().zip(rich.iter()) {
            assert_eq!(spec, &record.spec);
            assert_eq!(cats, &record.categories);
            assert!(record.fixtures.bytecode_hex.starts_with("0x"));
            assert_eq!(record.fixtures.ast["schema_version"], 1);
        }
    }

    #[test]
    fn canonical_sample_specs_cover_each_category() {
        for category in Category::ALL {
            let spec = sample_spec(category, Placement::Inline, 0);
            assert!(!spec.traps.is_empty());
            let again = sample_spec(category, Placement::Inline, 0);
            assert_eq!(spec, again);
        }
    }
}
