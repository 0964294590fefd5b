//! Acceptance gate: ten end-to-end checks, one test per criterion, each
//! printing a single PASS line (visible with `--nocapture`). Every check
//! scores the public API against an oracle computed independently inside
//! this file, under explicit runtime budgets where the contract sets one.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use trapdoor_core::amm::{PoolState, SwapSide};
use trapdoor_core::corpus::{
    clone_groups, fake_token_matches, label_token, lifetime, pool_address, profit_usd,
    run_pipeline, CloneItem, HighValueToken, PipelineConfig, PipelineInput, Verdict,
};
use trapdoor_core::events::{EventKind, EventRecord};
use trapdoor_core::mlkit::{
    default_grid, disassemble, disassemble_bytes, evaluate, opcode_features, smote_balance, train,
    BoostModel, Confusion, Dataset, LabeledSample, Metrics, Model, ModelConfig, ModelKind,
};
use trapdoor_core::probe::{run_probe, ProbeConfig};
use trapdoor_core::semantic::{detect_indicators, find_cycles, parse_ast, summarize};
use trapdoor_core::tokenvm::{
    contract_ast, sample_spec, synthesize_corpus_with_fixtures, Category, Concealment, FeeTrap,
    Placement, TokenInstance, TokenSpec,
};
use trapdoor_core::types::{Address, Ratio};

// ---------------------------------------------------------------- 1 ----

/// Largest output satisfying the fee-adjusted product rule, found by
/// stepping the candidate up one unit at a time — no closed formula.
fn bruteforce_max_out(reserve_in: u128, reserve_out: u128, amount_in: u128) -> u128 {
    let fits = |d: u128| d * (1000 * reserve_in + 997 * amount_in) <= 997 * amount_in * reserve_out;
    let mut d = 0;
    while d < reserve_out && fits(d + 1) {
        d += 1;
    }
    d
}

#[test]
fn criterion_01_amm_quote_matches_bruteforce_oracle() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA111);
    let cases = 10_000;
    for _ in 0..cases {
        let x = rng.gen_range(1..=10_000u128);
        let y = rng.gen_range(1..=10_000u128);
        let dx = rng.gen_range(1..=10_000u128);
        let mut pool = PoolState::create_pair(Address::new("0xtok"), Address::new("0xeth"))
            .expect("distinct tokens");
        pool.reserve_x = x;
        pool.reserve_y = y;

        let quote = pool
            .quote_swap(dx, SwapSide::XInYOut)
            .expect("nonzero reserves and input");
        assert_eq!(
            quote.amount_out,
            bruteforce_max_out(x, y, dx),
            "quote disagrees with oracle at x={x} y={y} dx={dx}"
        );

        let (after, _, _) = pool
            .execute_swap(dx, SwapSide::XInYOut, &Address::new("0xt"))
            .unwrap();
        let adjusted_x = 1000 * after.reserve_x - 3 * dx;
        let adjusted_product = adjusted_x * (1000 * after.reserve_y);
        assert!(
            adjusted_product >= 1_000_000 * x * y,
            "fee-adjusted product shrank at x={x} y={y} dx={dx}"
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}, budget 5 s");
    println!("[criterion 1] PASS — {cases} quotes equal the brute-force maximal-output oracle; invariant held; {elapsed:?}");
}

// ---------------------------------------------------------------- 2 ----

#[test]
fn criterion_02_pipeline_labels_thousand_token_corpus() {
    let started = Instant::now();
    let records = synthesize_corpus_with_fixtures(20_260_823, 100, 500);
    assert_eq!(records.len(), 1_000);
    let inputs: Vec<PipelineInput> = records.iter().map(PipelineInput::from).collect();
    let output = run_pipeline(&inputs, &PipelineConfig::default());

    let mut benign_right = 0usize;
    let mut armed_matched = 0usize;
    let mut blank_unknown = 0usize;
    for (record, token) in records.iter().zip(&output.report.tokens) {
        if record.categories.is_empty() {
            assert_eq!(
                token.label.verdict,
                Verdict::NonTrapdoor,
                "benign token {:?} mislabelled",
                token.token_id
            );
            benign_right += 1;
        } else if record.spec.conceals(Concealment::BlankError) {
            assert_eq!(
                token.label.verdict,
                Verdict::Unknown,
                "blank-error {:?}",
                token.token_id
            );
            blank_unknown += 1;
        } else {
            assert_eq!(
                token.label.verdict,
                Verdict::Trapdoor,
                "armed {:?}",
                token.token_id
            );
            let matched = token
                .label
                .matched_indicator
                .as_ref()
                .expect("matched indicator");
            assert!(
                record.categories.contains(&matched.category),
                "{:?}: matched {:?}, truth {:?}",
                token.token_id,
                matched.category,
                record.categories
            );
            armed_matched += 1;
        }
        // Zero false positives: a Trapdoor verdict only ever lands on a
        // token whose ground truth is armed.
        if token.label.verdict == Verdict::Trapdoor {
            assert!(
                !record.categories.is_empty(),
                "false positive on {:?}",
                token.token_id
            );
        }
    }
    assert_eq!(benign_right, 500);
    assert_eq!(armed_matched + blank_unknown, 500);
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "took {elapsed:?}, budget 30 s"
    );
    println!("[criterion 2] PASS — 500/500 benign NonTrapdoor, {armed_matched}/{armed_matched} non-blank armed Trapdoor with correct category, {blank_unknown} blank-error Unknown, 0 false positives; {elapsed:?}");
}

// ---------------------------------------------------------------- 3 ----

#[test]
fn criterion_03_every_placement_yields_the_planted_indicator() {
    let placements = [
        Placement::Inline,
        Placement::ViaModifier,
        Placement::ViaNestedFunction,
        Placement::ViaExternalContract,
    ];
    let mut hits = 0usize;
    for category in Category::ALL {
        let planted = match category {
            Category::Permission => "whitelisted",
            Category::Suspension => "paused",
            Category::AmountLimit => "_maxTxAmount",
            Category::FeeManipulation => "sellFee",
            Category::InvalidCallback => "burnToken",
        };
        for placement in placements {
            let spec = sample_spec(category, placement, 3);
            let ast = parse_ast(&contract_ast(&spec).to_string()).expect("generated AST parses");
            let summary = summarize(&ast);
            let indicators = detect_indicators(&ast, &summary);
            assert!(
                indicators
                    .iter()
                    .any(|i| i.category == category && i.identifier == planted),
                "{category:?} via {placement:?}: wanted {planted}, got {indicators:?}"
            );
            hits += 1;
        }
    }
    assert_eq!(hits, 20);
    println!("[criterion 3] PASS — 20/20 category × placement fixtures yield the planted indicator (nesting depth 3)");
}

// ---------------------------------------------------------------- 4 ----

/// Reference cycle finder: plain DFS reachability. A node lies on a cycle
/// iff it reaches itself; cyclic nodes group by mutual reachability.
fn dfs_cycle_groups(edges: &[(u32, u32)]) -> Vec<BTreeSet<u32>> {
    let mut adjacency: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
    let mut nodes: BTreeSet<u32> = BTreeSet::new();
    for &(from, to) in edges {
        adjacency.entry(from).or_default().insert(to);
        nodes.insert(from);
        nodes.insert(to);
    }
    let reachable = |start: u32| -> BTreeSet<u32> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<u32> = adjacency
            .get(&start)
            .into_iter()
            .flatten()
            .copied()
            .collect();
        while let Some(current) = stack.pop() {
            if seen.insert(current) {
                stack.extend(adjacency.get(&current).into_iter().flatten().copied());
            }
        }
        seen
    };
    let reach: BTreeMap<u32, BTreeSet<u32>> = nodes.iter().map(|&v| (v, reachable(v))).collect();
    let mut taken: BTreeSet<u32> = BTreeSet::new();
    let mut groups: Vec<BTreeSet<u32>> = Vec::new();
    for &v in &nodes {
        if taken.contains(&v) || !reach[&v].contains(&v) {
            continue;
        }
        let group: BTreeSet<u32> = nodes
            .iter()
            .copied()
            .filter(|&u| reach[&u].contains(&u) && reach[&v].contains(&u) && reach[&u].contains(&v))
            .collect();
        taken.extend(group.iter().copied());
        groups.push(group);
    }
    groups.sort_by_key(|g| g.first().copied());
    groups
}

#[test]
fn criterion_04_cycle_detection_matches_dfs_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC4C1E);
    let graphs = 1_000;
    for round in 0..graphs {
        let n = rng.gen_range(1..=12u32);
        let mut edges = Vec::new();
        for from in 0..n {
            for to in 0..n {
                if rng.gen_bool(0.18) {
                    edges.push((from, to));
                }
            }
        }
        assert_eq!(
            find_cycles(&edges),
            dfs_cycle_groups(&edges),
            "disagreement on graph {round} with {n} nodes: {edges:?}"
        );
    }
    println!("[criterion 4] PASS — find_cycles equals the DFS reachability oracle on {graphs} random digraphs (≤ 12 nodes)");
}

// ---------------------------------------------------------------- 5 ----

fn fee_token(sell_fee_bps: u32) -> TokenInstance {
    let mut spec = TokenSpec::benign(
        format!("0xfee{sell_fee_bps}"),
        "Fee Token",
        "FEE",
        1_000_000,
    );
    spec.traps.fee = Some(FeeTrap {
        buy_fee_bps: 0,
        sell_fee_bps,
        identifier: "sellFee".into(),
        has_setter: true,
    });
    let owner = spec.owner.clone();
    let pool = pool_address(&spec.id);
    let mut token = TokenInstance::deploy(spec);
    token
        .transfer(&owner, &pool, 500_000, &pool)
        .expect("owner seeds freely");
    token
}

fn probe_passes(token: &TokenInstance, acc_fee: Ratio) -> bool {
    let pool = pool_address(&token.spec.id);
    let config = ProbeConfig::with_acc_fee(acc_fee);
    run_probe(token, Some(&pool), &config)
        .expect("pool is seeded")
        .clean_pass()
}

#[test]
fn criterion_05_fee_threshold_and_monotonicity() {
    let tolerance_30 = Ratio::new(30, 100);
    assert!(
        probe_passes(&fee_token(2_900), tolerance_30),
        "29% fee must pass at 0.30"
    );
    assert!(
        !probe_passes(&fee_token(3_100), tolerance_30),
        "31% fee must fail at 0.30"
    );

    // Widening the tolerance can only turn failures into passes.
    let tolerances = [
        Ratio::new(10, 100),
        Ratio::new(30, 100),
        Ratio::new(50, 100),
    ];
    for fee_bps in (0..=6_000).step_by(250) {
        let token = fee_token(fee_bps);
        let outcomes: Vec<bool> = tolerances
            .iter()
            .map(|&t| probe_passes(&token, t))
            .collect();
        for pair in outcomes.windows(2) {
            assert!(
                !pair[0] || pair[1],
                "fee {fee_bps} bps passed a tighter tolerance but failed a looser one: {outcomes:?}"
            );
        }
    }
    println!("[criterion 5] PASS — 29% passes / 31% fails at acc_fee 0.30; pass set grows monotonically over acc_fee ∈ {{0.1, 0.3, 0.5}}");
}

// ---------------------------------------------------------------- 6 ----

#[test]
fn criterion_06_disassembler_count_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD15A);
    let strings = 1_000;
    for _ in 0..strings {
        let len = rng.gen_range(0..=300usize);
        let bytes: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
        let ops = disassemble_bytes(&bytes);
        let vector = opcode_features(&ops);
        assert_eq!(vector.total_ops, ops.len() as u64);
        assert_eq!(vector.counts.values().sum::<u64>(), ops.len() as u64);
    }

    let ops = disassemble("0x6001600101").expect("valid hex");
    let names: Vec<&str> = ops.iter().map(|op| op.mnemonic()).collect();
    assert_eq!(names, ["PUSH1", "PUSH1", "ADD"]);
    println!("[criterion 6] PASS — opcode counts sum to sequence length on {strings} random byte strings; 0x6001600101 → PUSH1,PUSH1,ADD");
}

// ---------------------------------------------------------------- 7 ----

#[test]
fn criterion_07_smote_balance_and_convexity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5A07E);
    let mut samples = Vec::new();
    for i in 0..160 {
        let features = vec![
            -1.0 + rng.gen::<f64>(),
            -1.0 + rng.gen::<f64>(),
            -1.0 + rng.gen::<f64>(),
        ];
        samples.push(LabeledSample {
            token_id: format!("maj{i}"),
            features,
            label: 0,
        });
    }
    for i in 0..37 {
        let features = vec![
            2.0 + rng.gen::<f64>(),
            2.0 + rng.gen::<f64>(),
            2.0 + rng.gen::<f64>(),
        ];
        samples.push(LabeledSample {
            token_id: format!("min{i}"),
            features,
            label: 1,
        });
    }

    let balanced = smote_balance(&samples, 5, 424_242).expect("balanceable");
    let ones = balanced.iter().filter(|s| s.label == 1).count();
    let zeros = balanced.len() - ones;
    assert_eq!(ones, 160, "minority lifted exactly to the majority count");
    assert_eq!(zeros, 160);

    // Every synthetic point must be a convex combination of two original
    // minority points: s = a + λ(b − a) with λ ∈ [0, 1], residual < 1e-9.
    let minority: Vec<&LabeledSample> = samples.iter().filter(|s| s.label == 1).collect();
    let synthetic = &balanced[samples.len()..];
    assert_eq!(synthetic.len(), 160 - 37);
    for point in synthetic {
        assert_eq!(point.label, 1);
        let mut best = f64::INFINITY;
        for a in &minority {
            for b in &minority {
                let (axis, span) = a
                    .features
                    .iter()
                    .zip(&b.features)
                    .map(|(&av, &bv)| bv - av)
                    .enumerate()
                    .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
                    .expect("three dims");
                let lambda = if span.abs() < 1e-15 {
                    0.0
                } else {
                    (point.features[axis] - a.features[axis]) / span
                };
                if !(-1e-9..=1.0 + 1e-9).contains(&lambda) {
                    continue;
                }
                let residual: f64 = point
                    .features
                    .iter()
                    .zip(a.features.iter().zip(&b.features))
                    .map(|(&s, (&av, &bv))| {
                        let expect = av + lambda * (bv - av);
                        (s - expect) * (s - expect)
                    })
                    .sum();
                best = best.min(residual);
            }
        }
        assert!(
            best < 1e-9,
            "synthetic point off the minority segments: residual {best}"
        );
    }

    let again = smote_balance(&samples, 5, 424_242).expect("balanceable");
    assert_eq!(balanced, again, "same seed, same synthesis");
    println!("[criterion 7] PASS — counts balanced 160/160; {}/{} synthetic points are convex combinations (residual < 1e-9); deterministic per seed", synthetic.len(), synthetic.len());
}

// ------------------------------------------------------------- 8, 9 ----

/// Shared 2,000-token synthetic opcode-feature corpus: 200 armed per
/// category + 1,000 benign, features = canonical opcode counts.
fn opcode_corpus(seed: u64) -> (Dataset, Vec<BTreeSet<Category>>) {
    let records = synthesize_corpus_with_fixtures(seed, 200, 1_000);
    let names: Vec<String> = trapdoor_core::mlkit::canonical_mnemonics()
        .iter()
        .map(|m| m.to_string())
        .collect();
    let mut dataset = Dataset::new(names);
    let mut truths = Vec::with_capacity(records.len());
    for record in &records {
        let ops = disassemble(&record.fixtures.bytecode_hex).expect("generated hex");
        dataset
            .push(LabeledSample {
                token_id: record.spec.id.to_string(),
                features: opcode_features(&ops).to_feature_row(),
                label: u8::from(!record.categories.is_empty()),
            })
            .expect("uniform feature space");
        truths.push(record.categories.clone());
    }
    (dataset, truths)
}

#[test]
fn criterion_08_boosted_trees_reach_f1_on_heldout_data() {
    let (dataset, _) = opcode_corpus(0x0815);
    assert_eq!(dataset.len(), 2_000);

    // Guard-heavy traps leave their mark: the mean term frequency (the
    // per-contract mnemonic count the classifier consumes) of storage
    // reads and comparisons is strictly higher in armed stubs.
    for watched in ["SLOAD", "EQ", "ISZERO"] {
        let column = dataset
            .feature_names
            .iter()
            .position(|n| n == watched)
            .expect("canonical mnemonic");
        let mean = |label: u8| -> f64 {
            let rows: Vec<&LabeledSample> = dataset
                .samples
                .iter()
                .filter(|s| s.label == label)
                .collect();
            rows.iter().map(|s| s.features[column]).sum::<f64>() / rows.len() as f64
        };
        assert!(
            mean(1) > mean(0),
            "mean {watched} frequency should be higher in armed stubs"
        );
    }

    let grid = [ModelConfig::GradientBoostedTrees {
        learning_rate: 0.2,
        n_estimators: 50,
    }];
    let scores: Vec<f64> = (0..10u64)
        .into_par_iter()
        .map(|rep| {
            let report = train(
                &dataset,
                ModelKind::GradientBoostedTrees,
                &grid,
                9_000 + rep,
            )
            .expect("trainable corpus");
            report.test_metrics.f1.as_f64()
        })
        .collect();
    let mean_f1 = scores.iter().sum::<f64>() / scores.len() as f64;
    assert!(
        mean_f1 >= 0.95,
        "mean held-out F1 {mean_f1:.4} below 0.95 (per-rep: {scores:?})"
    );

    // Metrics identities against a hand-computed confusion.
    let metrics = Metrics::from_confusion(Confusion {
        tp: 8,
        fp: 2,
        tn: 9,
        fn_: 1,
    });
    assert!((metrics.accuracy.as_f64() - 0.85).abs() < 1e-12);
    assert!((metrics.precision.as_f64() - 0.8).abs() < 1e-12);
    assert!((metrics.recall.as_f64() - 8.0 / 9.0).abs() < 1e-12);
    assert!((metrics.f1.as_f64() - 16.0 / 19.0).abs() < 1e-12);
    println!("[criterion 8] PASS — mean held-out F1 {mean_f1:.4} ≥ 0.95 over 10 seeded repetitions; metrics match the hand confusion to 1e-12");
}

#[test]
fn criterion_09_one_vs_rest_technique_classifiers() {
    let (dataset, truths) = opcode_corpus(0x0916);
    let scores: Vec<(Category, f64)> = Category::ALL
        .into_par_iter()
        .map(|category| {
            let mut rows = dataset.clone();
            for (sample, truth) in rows.samples.iter_mut().zip(&truths) {
                sample.label = u8::from(truth.contains(&category));
            }
            let (train_rows, test_rows) = rows.split(0.2, 0x0916 + category as u64);
            let balanced = Dataset {
                feature_names: rows.feature_names.clone(),
                samples: smote_balance(&train_rows.samples, 5, 77).expect("balanceable"),
            };
            let model = Model::Boost(BoostModel::fit(&balanced, 0.2, 60));
            (category, evaluate(&model, &test_rows).f1.as_f64())
        })
        .collect();
    for &(category, f1) in &scores {
        assert!(f1 >= 0.90, "{category:?} one-vs-rest F1 {f1:.4} below 0.90");
    }
    let listing = scores
        .iter()
        .map(|(c, f1)| format!("{}={:.3}", c.short(), f1))
        .collect::<Vec<_>>()
        .join(", ");
    println!("[criterion 9] PASS — five one-vs-rest classifiers clear F1 0.90 after balancing: {listing}");
}

// --------------------------------------------------------------- 10 ----

#[test]
fn criterion_10_analytics_fixture_examples() {
    // Lifetime: created at 100, last transfer at 168 → 68 blocks.
    let transfer = |block: u64, log: u64| {
        EventRecord::new(
            block,
            log,
            EventKind::Transfer {
                from: Address::new("0xa"),
                to: Address::new("0xb"),
                amount: 1,
            },
        )
    };
    assert_eq!(lifetime(&[transfer(100, 0), transfer(168, 1)], 100), 68);
    assert_eq!(lifetime(&[], 100), 0);
    assert_eq!(lifetime(&[transfer(100, 0)], 100), 0);

    // Clone groups: {A, B identical, C distinct} → sizes 2 and 1;
    // 5 identical contracts from 4 creators → (5 tokens, 4 creators).
    let item = |token: &str, creator: &str, digest: &str| CloneItem {
        token_id: Address::new(token),
        creator: Address::new(creator),
        digest: digest.into(),
    };
    let groups = clone_groups(&[
        item("0xa", "0x1", "dd"),
        item("0xb", "0x2", "dd"),
        item("0xc", "0x3", "ee"),
    ]);
    assert_eq!(groups.len(), 2);
    assert_eq!(groups[0].size(), 2);
    assert_eq!(groups[1].size(), 1);
    let all_distinct = clone_groups(&[item("0xa", "0x1", "d1"), item("0xb", "0x2", "d2")]);
    assert!(all_distinct.iter().all(|g| g.size() == 1));
    let five = clone_groups(&[
        item("0xa", "0x1", "dd"),
        item("0xb", "0x2", "dd"),
        item("0xc", "0x3", "dd"),
        item("0xd", "0x4", "dd"),
        item("0xe", "0x4", "dd"),
    ]);
    assert_eq!((five[0].size(), five[0].distinct_creators), (5, 4));

    // Fake-token matches: "BONE" matches, "B0NE" does not, and the
    // high-value token never matches itself.
    let bone = HighValueToken {
        token_id: Address::new("0xbone"),
        name: "Bone ShibaSwap".into(),
        symbol: "BONE".into(),
        market_cap_usd: 25_000_000,
        pool_count: 120,
    };
    let records = vec![
        (
            Address::new("0xscam"),
            "Bone".to_string(),
            "BONE".to_string(),
        ),
        (
            Address::new("0xnear"),
            "Bone".to_string(),
            "B0NE".to_string(),
        ),
        (
            Address::new("0xbone"),
            "Bone ShibaSwap".to_string(),
            "BONE".to_string(),
        ),
    ];
    let matches = fake_token_matches(&records, &[bone]);
    assert_eq!(matches.len(), 1);
    assert_eq!(matches[0].token_id, Address::new("0xscam"));

    // Profit: 10 WETH in, 2 WETH out, price $2,000 → $16,000; empty
    // history → $0; outflow-dominated history stays negative.
    let swap = |log: u64, token_in: &str, amount_in: u128, token_out: &str, amount_out: u128| {
        EventRecord::new(
            5,
            log,
            EventKind::Swap {
                sender: Address::new("0xtrader"),
                token_in: Address::new(token_in),
                amount_in,
                token_out: Address::new(token_out),
                amount_out,
            },
        )
    };
    let token = Address::new("0xtok");
    let prices = BTreeMap::from([(Address::new("0xweth"), 2_000.0)]);
    let history = vec![
        swap(0, "0xweth", 10, "0xtok", 90),
        swap(1, "0xtok", 40, "0xweth", 2),
    ];
    assert_eq!(profit_usd(&history, &token, &prices).unwrap(), 16_000.0);
    assert_eq!(profit_usd(&[], &token, &prices).unwrap(), 0.0);
    let upside_down = vec![
        swap(0, "0xweth", 1, "0xtok", 9),
        swap(1, "0xtok", 9, "0xweth", 4),
    ];
    assert_eq!(profit_usd(&upside_down, &token, &prices).unwrap(), -6_000.0);

    // The labelling fixtures behind the verdict table stay exact too.
    let clean = {
        let spec = TokenSpec::benign("0xclean", "Clean", "CLN", 1_000_000);
        let owner = spec.owner.clone();
        let pool = pool_address(&spec.id);
        let mut token = TokenInstance::deploy(spec);
        token.transfer(&owner, &pool, 500_000, &pool).unwrap();
        run_probe(&token, Some(&pool), &ProbeConfig::default()).unwrap()
    };
    assert_eq!(label_token(&clean, &[]).verdict, Verdict::NonTrapdoor);

    // Exercise the default grids once so the advertised search spaces
    // stay wired into the public API.
    assert_eq!(default_grid(ModelKind::GradientBoostedTrees).len(), 9);
    println!("[criterion 10] PASS — lifetime (68-block case), clone groups, fake-token matches, and profit fixtures reproduce exactly");
}
