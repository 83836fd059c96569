//! Monte-Carlo benchmark over scenarios, dimensions and training sizes.

mod distance;
mod report;
mod run;

pub use distance::{hamming_distance, l2_distance};
pub use report::{emit_report, summarize, CellSummary, SUMMARY_METRICS};
pub use run::{run_benchmark, BenchmarkConfig, MetricsRow};
