//! Machine-learning toolkit for token triage: bytecode disassembly into
//! opcode frequency features, exchange-activity features, dataset
//! handling, class rebalancing, four classifier families, and the
//! grid-search/cross-validation loop that ties them together.
//!
//! Everything here is deterministic: models that need randomness take an
//! explicit seed, and identical seed and data always reproduce the same
//! fitted model and predictions bit-for-bit.

pub mod boost;
pub mod dataset;
pub mod disasm;
pub mod features;
pub mod knn;
pub mod metrics;
pub mod smote;
pub mod svm;
pub mod train;
pub mod tree;

pub use boost::BoostModel;
pub use dataset::{Dataset, DatasetError, LabeledSample, MinMaxScaler};
pub use disasm::{
    canonical_mnemonics, disassemble, disassemble_bytes, opcode_features, DecodedOp, DisasmError,
    OpcodeVector,
};
pub use features::{exchange_features, ExchangeFeatures, FeatureError};
pub use knn::KnnModel;
pub use metrics::{Confusion, Metrics};
pub use smote::{smote_balance, SmoteError};
pub use svm::{SvmKernel, SvmModel};
pub use train::{
    default_grid, evaluate, train, Model, ModelConfig, ModelFile, ModelKind, TrainError,
    TrainReport,
};
pub use tree::{DecisionTree, ForestModel};
