//! Leak-free, server-perspective training rows.
//!
//! For every match the pipeline is
//!
//! 1. [`accumulate`]: per-player running counts of every event flag and
//!    placement category over the points *before* the current one;
//! 2. [`shift_outcomes`]: the published post-point scoreboard moved down one
//!    row so each row shows the score as the point began;
//! 3. [`to_server_perspective`]: P1/P2 columns swapped on points served by
//!    player 2, so player 1 is always the server and the label is "server won".
//!
//! [`prepare_dataset`] runs all three over a merged dataset. [`encode`] then
//! one-hot encodes categoricals and standardizes numerics, and
//! [`make_split_plan`] assigns whole matches to test, train, validation and
//! cross-validation folds.

mod accumulate;
mod encode;
mod file;
mod perspective;
mod rows;
mod split;
mod state;

pub use accumulate::{accumulate, AccumulatedColumns};
pub use encode::{encode, ColumnKind, ColumnSpec, FeatureMatrix, FeatureSchema, NumericParams, OneHotGroup};
pub use file::{read_prepared, write_prepared, write_schema_sidecar};
pub use perspective::{to_server_perspective, PairMap};
pub use rows::{
    canonical_layout, prepare_dataset, prepare_match, split_by_serve, PointRow, PreparedRow, PreparedSet,
    RowLayout,
};
pub use split::{make_split_plan, read_split_plan, write_split_plan, MatchRole, SplitPlan, SplitRatios};
pub use state::{break_point_pending, encode_score, shift_outcomes, PrePointState};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("match `{match_id}`: point {index} is not after its predecessor")]
    UnorderedPoints { match_id: String, index: usize },
    #[error("column `{0}` has no P1/P2 twin")]
    UnpairedColumn(String),
    #[error("match `{match_id}`: unreadable score token {token:?}")]
    InvalidScore { match_id: String, token: String },
    #[error("{found} matches cannot fill a test split and {folds} non-empty folds")]
    TooFewMatches { found: usize, folds: usize },
    #[error("invalid split configuration: {0}")]
    InvalidSplit(String),
    #[error("prepared file: {0}")]
    Format(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = FeatureError> = std::result::Result<T, E>;
