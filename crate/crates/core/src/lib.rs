//! Reconstructs directed social graphs from discussion-forum threads,
//! computes per-user social metrics, and relates them to final grades.
//!
//! Pipeline: ingest course files ([`model`]) -> build the weighted reply
//! graph ([`graph`]) -> compute in/out degree, betweenness, and HITS
//! scores ([`metrics`]) -> run group tests and rank correlations
//! ([`stats`], [`analysis`]). [`synth`] generates reproducible courses for
//! verification and [`oracle`] cross-checks the metric kernels against
//! brute-force reimplementations.

pub mod analysis;
pub mod graph;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod stats;
pub mod synth;

pub use analysis::{AnalysisConfig, AnalysisReport};
pub use graph::{BuildOptions, SocialGraph};
pub use metrics::{HitsConfig, MetricTable};
pub use model::{Course, Role, UserId};
pub use synth::SynthParams;
