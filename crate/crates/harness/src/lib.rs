//! Experiment harness for `dnasim-core`: configuration, deterministic
//! parameter sweeps, paired selection comparison and CSV reporting.

pub mod config;
pub mod error;
pub mod experiment;
pub mod report;

pub use config::{ExperimentConfig, PayloadSource, SelectionMode};
pub use error::{HarnessError, Result};
pub use experiment::{
    compare_selection, run_sweep, run_trial, run_trial_with_payload, screen_segment, ComparisonRow, PreparedPayload,
    SegmentOutcome, SweepResult, TrialKey, TrialRecord,
};
