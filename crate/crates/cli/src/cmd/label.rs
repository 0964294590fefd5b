//! `trapdoor label` — run the full labeling pipeline over a manifest and
//! persist the dataset and report.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use serde_json::json;

use trapdoor_core::corpus::{
    persist_output, read_manifest, run_pipeline, PipelineConfig, PipelineInput,
};
use trapdoor_core::probe::ProbeConfig;

use super::{fraction_to_ratio, parse_fraction, print_json, Status};

#[derive(Args, Debug)]
pub struct LabelArgs {
    /// Corpus manifest (JSON lines); fixture paths resolve relative to it.
    #[arg(long)]
    pub manifest: PathBuf,

    /// Directory `dataset.csv` and `report.json` are written into.
    #[arg(long)]
    pub out: PathBuf,

    /// Acceptable sell-fee threshold for the probe stage.
    #[arg(long, default_value_t = 0.30, value_parser = parse_fraction)]
    pub acc_fee: f64,
}

pub fn run(args: &LabelArgs) -> Result<Status> {
    let entries = read_manifest(&args.manifest)
        .with_context(|| format!("cannot read manifest {}", args.manifest.display()))?;
    let base = args.manifest.parent().unwrap_or_else(|| Path::new("."));

    let mut fixture_failures = 0usize;
    let inputs: Vec<PipelineInput> = entries
        .iter()
        .map(|entry| {
            let mut read_fixture = |relative: &Option<String>| -> Option<String> {
                let relative = relative.as_ref()?;
                match fs::read_to_string(base.join(relative)) {
                    Ok(text) => Some(text),
                    Err(err) => {
                        eprintln!("warning: {}: cannot read {relative}: {err}", entry.spec.id);
                        fixture_failures += 1;
                        None
                    }
                }
            };
            let ast_json = read_fixture(&entry.paths.ast);
            let bytecode_hex = read_fixture(&entry.paths.bytecode).map(|s| s.trim().to_string());
            PipelineInput {
                spec: entry.spec.clone(),
                truth: entry.categories.clone(),
                ast_json,
                bytecode_hex,
            }
        })
        .collect();

    let config = PipelineConfig {
        probe: ProbeConfig::with_acc_fee(fraction_to_ratio(args.acc_fee)),
    };
    let output = run_pipeline(&inputs, &config);
    persist_output(&output, &args.out)
        .with_context(|| format!("cannot write artifacts under {}", args.out.display()))?;

    let report = &output.report;
    print_json(&json!({
        "total": report.total,
        "non_trapdoor": report.non_trapdoor,
        "trapdoor": report.trapdoor,
        "unknown": report.unknown,
        "trapdoor_by_category": report.trapdoor_by_category,
        "tokens_with_notes": report.tokens_with_notes,
        "dataset_rows": output.dataset.samples.len(),
        "out": args.out,
    }))?;

    if report.tokens_with_notes > 0 || fixture_failures > 0 {
        Ok(Status::Partial)
    } else {
        Ok(Status::Clean)
    }
}
