//! Batch driver, report writers, overlays and synthetic fixtures behind the
//! `proxeval` binary.

pub mod batch;
pub mod fixtures;
pub mod overlay;
pub mod report;

pub use batch::{run_batch, run_overlays, summarize_results, BatchReport, ImageOutcome, RunConfig};
