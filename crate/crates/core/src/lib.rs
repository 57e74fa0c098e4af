//! Point-winner prediction for Grand Slam tennis.
//!
//! The crate covers the whole batch pipeline over public point-by-point
//! data:
//!
//! * [`ingest`] parses point files, match metadata and ATP rankings and merges
//!   them into a scope-filtered [`ingest::MergedDataset`].
//! * [`featureset`] turns every match into leak-free, server-perspective rows,
//!   one-hot encodes and standardizes them, and plans match-level splits.
//! * [`models`] holds the five classifier families (prior baseline, logistic
//!   regression, random forest, AdaBoost, second-order gradient boosting).
//! * [`eval`] has the metric suite, match-level cross-validation and random
//!   hyperparameter search.
//! * [`analysis`] produces serve-placement grids, win-rate summaries and SVG
//!   charts.
//! * [`cli`] wires the stages into the `pointwin` command.
//!
//! [`synth`] simulates matches in the same file layout as the public data and
//! is what the runnable examples and most tests feed through the pipeline.

pub mod analysis;
pub mod cli;
pub mod eval;
pub mod featureset;
pub mod ingest;
pub mod models;
pub mod synth;

mod artifact;

pub use artifact::{ArtifactStamp, SCHEMA_VERSION};
