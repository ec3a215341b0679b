//! Benchmark harness: controllers, episode rollouts, goal metrics, seed
//! aggregation and suite runs.

pub mod controller;
pub mod episode;
pub mod metrics;
pub mod report;
pub mod suite;

pub use controller::{
    controller_for, Controller, CpgController, GaitController, PolicyController, StationaryController,
};
pub use episode::{run_episode, run_episode_traced, write_trace_csv, TraceRow};
pub use metrics::{EpisodeMetrics, MetricsTracker};
pub use report::{aggregate, format_std, markdown_table, ScenarioReport, Summary};
pub use suite::{
    artifact_stem, evaluate_version, learning_curves_svg, metrics_csv, run_suite, train_version, write_suite_outputs,
    SuiteConfig, SuiteResult, METRICS_HEADER,
};
