//! `trapdoor train` — fit a classifier on a labelled feature dataset.

use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use serde_json::json;

use trapdoor_core::mlkit::{default_grid, train, Dataset, ModelFile, ModelKind};

use super::{print_json, Status};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CliModel {
    /// k-nearest-neighbour voting
    Knn,
    /// support-vector machine with a polynomial kernel
    Svm,
    /// random forest over Gini-split decision trees
    RandomForest,
    /// gradient-boosted decision trees
    #[value(alias = "gbt")]
    GradientBoostedTrees,
}

impl CliModel {
    fn kind(self) -> ModelKind {
        match self {
            CliModel::Knn => ModelKind::Knn,
            CliModel::Svm => ModelKind::SvmPoly,
            CliModel::RandomForest => ModelKind::RandomForest,
            CliModel::GradientBoostedTrees => ModelKind::GradientBoostedTrees,
        }
    }
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Labelled feature dataset (CSV with token_id, label, then features).
    #[arg(long)]
    pub dataset: PathBuf,

    /// Model family to fit.
    #[arg(long, value_enum)]
    pub model: CliModel,

    /// Sweep the family's full hyperparameter grid with cross-validation
    /// instead of fitting the single default configuration.
    #[arg(long)]
    pub grid: bool,

    /// RNG seed for the train/test split, folds, and seeded fitters.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,

    /// Where to write the fitted model envelope (JSON).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &TrainArgs) -> Result<Status> {
    let file = fs::File::open(&args.dataset)
        .with_context(|| format!("cannot read {}", args.dataset.display()))?;
    let dataset = Dataset::read_csv(file)
        .with_context(|| format!("{} is not a feature dataset", args.dataset.display()))?;

    let kind = args.model.kind();
    let full_grid = default_grid(kind);
    let grid = if args.grid {
        full_grid
    } else {
        vec![full_grid[0]]
    };

    let report = train(&dataset, kind, &grid, args.seed).context("training failed")?;

    if let Some(out) = &args.out {
        let envelope = ModelFile::from_report(&report);
        fs::write(out, serde_json::to_string_pretty(&envelope)?)
            .with_context(|| format!("cannot write {}", out.display()))?;
    }

    print_json(&json!({
        "kind": report.kind,
        "seed": report.seed,
        "samples": dataset.samples.len(),
        "features": dataset.feature_names.len(),
        "grid_size": grid.len(),
        "best_config": report.best_config,
        "cv_scores": report.cv_scores,
        "test_metrics": report.test_metrics,
        "model_written": args.out,
    }))?;
    Ok(Status::Clean)
}
