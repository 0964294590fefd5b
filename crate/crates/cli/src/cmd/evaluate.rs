//! `trapdoor evaluate` — score a fitted model against a labelled dataset.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde_json::json;

use trapdoor_core::mlkit::{evaluate, Dataset, ModelFile};

use super::{print_json, read_required, Status};

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Fitted model envelope written by `train --out` (JSON).
    #[arg(long)]
    pub model: PathBuf,

    /// Labelled feature dataset to score against (CSV).
    #[arg(long)]
    pub dataset: PathBuf,
}

pub fn run(args: &EvaluateArgs) -> Result<Status> {
    let envelope: ModelFile = serde_json::from_str(&read_required(&args.model)?)
        .with_context(|| format!("{} is not a model file", args.model.display()))?;
    let file = fs::File::open(&args.dataset)
        .with_context(|| format!("cannot read {}", args.dataset.display()))?;
    let dataset = Dataset::read_csv(file)
        .with_context(|| format!("{} is not a feature dataset", args.dataset.display()))?;

    if !envelope.feature_names.is_empty() && envelope.feature_names != dataset.feature_names {
        bail!(
            "dataset columns do not match the model's training schema \
             ({} model columns vs {} dataset columns)",
            envelope.feature_names.len(),
            dataset.feature_names.len()
        );
    }

    let metrics = evaluate(&envelope.model, &dataset);
    print_json(&json!({
        "kind": envelope.kind,
        "config": envelope.config,
        "samples": dataset.samples.len(),
        "metrics": metrics,
    }))?;
    Ok(Status::Clean)
}
