//! Corpus assembly and field-study plumbing.
//!
//! Everything downstream of a single token lives here:
//!
//! - [`records`]: manifest and token-record types with atomic
//!   JSON-lines persistence;
//! - [`filter`]: the on-chain candidate filter — pairing with a
//!   high-value token, the single-seller and many-buyer rules, and the
//!   one-month listing requirement;
//! - [`scenario`]: scripted trading-history simulation, from benign
//!   lives to rug pulls and filter-evading disarm windows;
//! - [`label`]: the probe-versus-audit crosscheck that issues
//!   `Trapdoor` / `NonTrapdoor` / `Unknown` verdicts;
//! - [`analytics`]: lifetimes, byte-identical clone groups,
//!   high-value impersonation matches, and realized profit;
//! - [`pipeline`]: the batch orchestrator tying audit, probe, label,
//!   and feature extraction together with fault isolation.

pub mod analytics;
pub mod filter;
pub mod label;
pub mod pipeline;
pub mod records;
pub mod scenario;

pub use analytics::{
    clone_groups, code_digest, fake_token_matches, lifetime, profit_usd, CloneGroup, CloneItem,
    FakeTokenMatch,
};
pub use filter::{is_suspicious, trade_stats, TokenTradeStats, DEFAULT_MONTH_BLOCKS};
pub use label::{label_token, Label, MatchSite, Verdict};
pub use pipeline::{
    persist_output, run_pipeline, PipelineConfig, PipelineInput, PipelineOutput, PipelineReport,
    TokenReport,
};
pub use records::{
    read_events, read_manifest, read_token_records, write_events, write_manifest,
    write_token_records, CorpusError, FixturePaths, HighValueToken, ManifestEntry, PoolLink,
    TokenRecord, HIGH_VALUE_MIN_MARKET_CAP_USD, HIGH_VALUE_MIN_POOLS,
};
pub use scenario::{pool_address, simulate_history, ScenarioConfig, TokenHistory};
