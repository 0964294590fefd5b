//! End-to-end batch orchestration: static audit, dynamic probe,
//! labelling, and feature extraction for every token in a manifest,
//! with per-token fault isolation and atomic persistence.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::label::{label_token, Label, Verdict};
use crate::corpus::records::CorpusError;
use crate::corpus::scenario::pool_address;
use crate::mlkit::{disassemble, opcode_features, Dataset, LabeledSample};
use crate::probe::{run_probe, ProbeConfig, ProbeOutcome};
use crate::semantic::{detect_indicators, parse_ast, summarize, Indicator};
use crate::tokenvm::{Category, SynthRecord, TokenInstance, TokenSpec};
use crate::types::Address;

/// One token's raw material: its behavioural spec plus whatever static
/// artifacts are on file. Ground-truth categories ride along when known
/// (synthetic corpora) and stay empty for field data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineInput {
    pub spec: TokenSpec,
    #[serde(default)]
    pub truth: BTreeSet<Category>,
    /// Contract AST document, when source is available.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ast_json: Option<String>,
    /// Runtime bytecode as hex, when on file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bytecode_hex: Option<String>,
}

impl From<&SynthRecord> for PipelineInput {
    fn from(record: &SynthRecord) -> Self {
        PipelineInput {
            spec: record.spec.clone(),
            truth: record.categories.clone(),
            ast_json: Some(record.fixtures.ast.to_string()),
            bytecode_hex: Some(record.fixtures.bytecode_hex.clone()),
        }
    }
}

/// Pipeline knobs; today just the probe parameters.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub probe: ProbeConfig,
}

/// Everything decided about one token, plus any trouble hit on the way.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TokenReport {
    pub token_id: Address,
    #[serde(default)]
    pub truth: BTreeSet<Category>,
    pub indicators: Vec<Indicator>,
    pub label: Label,
    /// Human-readable notes on ingestion or probe harness failures.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Batch roll-up: verdict counts, per-category trapdoor counts, and the
/// per-token detail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub total: usize,
    pub non_trapdoor: usize,
    pub trapdoor: usize,
    pub unknown: usize,
    /// Trapdoor verdicts keyed by the matched indicator's category.
    pub trapdoor_by_category: BTreeMap<Category, usize>,
    /// Tokens with at least one note (fault isolation, not verdicts).
    pub tokens_with_notes: usize,
    pub tokens: Vec<TokenReport>,
}

/// What a batch run produces: one feature row per decided token and the
/// full report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineOutput {
    pub dataset: Dataset,
    pub report: PipelineReport,
}

/// An all-blank probe outcome for tokens the harness could not probe.
fn unprobed() -> ProbeOutcome {
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

fn process_token(
    input: &PipelineInput,
    config: &PipelineConfig,
) -> (TokenReport, Option<LabeledSample>) {
    let mut notes = Vec::new();

    // Static audit. A malformed document is noted and forces Unknown:
    // without a trustworthy indicator list neither decisive verdict is
    // safe to issue.
    let mut ingest_failed = false;
    let indicators: Vec<Indicator> = match &input.ast_json {
        Some(document) => match parse_ast(document) {
            Ok(ast) => {
                let summary = summarize(&ast);
                detect_indicators(&ast, &summary)
            }
            Err(err) => {
                ingest_failed = true;
                notes.push(format!("ast ingestion failed: {err}"));
                Vec::new()
            }
        },
        None => Vec::new(),
    };

    // Dynamic probe against a freshly seeded pool snapshot.
    let mut token = TokenInstance::deploy(input.spec.clone());
    let pool = pool_address(&input.spec.id);
    let owner = input.spec.owner.clone();
    let liquidity = (input.spec.total_supply / 2).max(1);
    if token.transfer(&owner, &pool, liquidity, &pool).is_err() {
        notes.push("pool seeding failed".to_string());
    }
    let probe_outcome = match run_probe(&token, Some(&pool), &config.probe) {
        Ok(outcome) => outcome,
        Err(err) => {
            notes.push(format!("probe harness failed: {err}"));
            unprobed()
        }
    };

    let label = if ingest_failed {
        Label {
            verdict: Verdict::Unknown,
            matched_indicator: None,
            matched_in: None,
            probe: probe_outcome,
        }
    } else {
        label_token(&probe_outcome, &indicators)
    };

    // Feature extraction; only decided tokens become training rows.
    let sample = match (&input.bytecode_hex, label.verdict) {
        (Some(hex), Verdict::Trapdoor | Verdict::NonTrapdoor) => match disassemble(hex) {
            Ok(ops) => Some(LabeledSample {
                token_id: input.spec.id.to_string(),
                features: opcode_features(&ops).to_feature_row(),
                label: u8::from(label.verdict == Verdict::Trapdoor),
            }),
            Err(err) => {
                notes.push(format!("bytecode ingestion failed: {err}"));
                None
            }
        },
        _ => None,
    };

    let report = TokenReport {
        token_id: input.spec.id.clone(),
        truth: input.truth.clone(),
        indicators,
        label,
        notes,
    };
    (report, sample)
}

/// Run the full audit-probe-label-featurize flow over a batch.
///
/// Tokens are processed in parallel; per-token failures become notes on
/// that token's report and never abort the batch. Output order follows
/// input order, so a batch is deterministic for fixed inputs.
pub fn run_pipeline(inputs: &[PipelineInput], config: &PipelineConfig) -> PipelineOutput {
    let per_token: Vec<(TokenReport, Option<LabeledSample>)> = inputs
        .par_iter()
        .map(|input| process_token(input, config))
        .collect();

    let feature_names: Vec<String> = crate::mlkit::canonical_mnemonics()
        .iter()
        .map(|m| m.to_string())
        .collect();
    let mut dataset = Dataset::new(feature_names);
    let mut tokens = Vec::with_capacity(per_token.len());
    let mut non_trapdoor = 0usize;
    let mut trapdoor = 0usize;
    let mut unknown = 0usize;
    let mut trapdoor_by_category: BTreeMap<Category, usize> = BTreeMap::new();
    let mut tokens_with_notes = 0usize;

    for (report, sample) in per_token {
        match report.label.verdict {
            Verdict::NonTrapdoor => non_trapdoor += 1,
            Verdict::Trapdoor => {
                trapdoor += 1;
                if let Some(indicator) = &report.label.matched_indicator {
                    *trapdoor_by_category.entry(indicator.category).or_insert(0) += 1;
                }
            }
            Verdict::Unknown => unknown += 1,
        }
        if !report.notes.is_empty() {
            tokens_with_notes += 1;
        }
        if let Some(sample) = sample {
            dataset
                .push(sample)
                .expect("rows share the canonical feature space");
        }
        tokens.push(report);
    }

    PipelineOutput {
        dataset,
        report: PipelineReport {
            total: tokens.len(),
            non_trapdoor,
            trapdoor,
            unknown,
            trapdoor_by_category,
            tokens_with_notes,
            tokens,
        },
    }
}

/// Write `dataset.csv` and `report.json` under `dir`, each atomically
/// (tempfile-and-rename), so readers never observe half-written files.
pub fn persist_output(output: &PipelineOutput, dir: &Path) -> Result<(), CorpusError> {
    std::fs::create_dir_all(dir)?;
    let mut csv_bytes = Vec::new();
    output
        .dataset
        .write_csv(&mut csv_bytes)
        .map_err(|e| CorpusError::Io {
            detail: e.to_string(),
        })?;
    write_atomic(&dir.join("dataset.csv"), &csv_bytes)?;
    let json_bytes = serde_json::to_vec_pretty(&output.report).map_err(|e| CorpusError::Io {
        detail: e.to_string(),
    })?;
    write_atomic(&dir.join("report.json"), &json_bytes)?;
    Ok(())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CorpusError> {
    let tmp = path.with_extension("tmp");
    {
        let mut file = std::fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}
