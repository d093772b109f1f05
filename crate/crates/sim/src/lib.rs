//! Monte Carlo campaigns, file formats and self-validation on top of
//! `urllc-core`.

pub mod config;
pub mod harness;
pub mod oracle;
pub mod output;
pub mod stats;
pub mod validate;

pub use harness::{
    run_campaign, sweep_message_size, Campaign, ReliabilityReport, SchemeSummary, TrialRecord,
};
