//! Sampling-based MapReduce clustering for k-center and k-median.
//!
//! The crate simulates a MapReduce cluster in-process ([`mr`]), shrinks the
//! input with iterative sampling ([`sampling`]), and runs sequential
//! clusterers on the sample ([`clusterers`]) inside full pipelines
//! ([`pipelines`]). [`bench`] drives experiments and backs the `mrcluster`
//! binary.

pub mod bench;
pub mod clusterers;
pub mod datagen;
pub mod error;
pub mod exact;
pub mod metric;
pub mod mr;
pub mod pipelines;
pub mod sampling;
pub mod seed;

pub use error::{Error, Result};
pub use metric::{evaluate, ClusteringSolution, Dataset, ObjectiveKind, PointId, WeightedPointSet};
pub use mr::{ClusterConfig, JobTrace, TimeMode};
pub use sampling::{iterative_sample, mr_iterative_sample, SampleConfig, SampleOutcome};
