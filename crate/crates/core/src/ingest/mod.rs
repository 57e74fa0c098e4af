//! Parsing and merging of the public point-by-point files, the companion match
//! metadata and the ATP ranking history.
//!
//! The entry points are [`parse_points_file`], [`parse_matches_file`],
//! [`parse_rankings`] and [`assemble_dataset`]. The merged result can be
//! written to and read back from a single tab-separated dataset file with
//! [`write_dataset`] / [`read_dataset`].

mod assemble;
mod dataset_file;
mod matches;
mod points;
mod rankings;
mod tournament;

pub use assemble::{apply_id_overrides, assemble_dataset, Exclusion, MergedDataset, MergedMatch, Scope};
pub use dataset_file::{read_dataset, write_dataset, write_exclusions, DATASET_MAGIC};
pub use matches::{parse_matches_file, Gender, MatchMeta};
pub use points::{
    parse_points_file, Dialect, EventFlag, Measurement, PlayerEvents, RawPoint, ReturnDepth,
    ServeDepth, ServeWidth, Spillover, TABLE1_COLUMNS,
};
pub use rankings::{canonical_name, parse_rankings, RankAtMatch, RankLookup, RankingTable};
pub use tournament::{Surface, Tournament};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("missing required column `{0}`")]
    MissingColumn(String),
    #[error("line {line}: expected {expected} fields, found {found}")]
    MalformedRow {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: invalid value {value:?} in column `{column}`")]
    InvalidValue {
        line: u64,
        column: String,
        value: String,
    },
    #[error("unknown tournament code {0:?}")]
    UnknownTournament(String),
    #[error("no matches survive the scope filter")]
    EmptyScope,
    #[error("match `{0}` appears more than once in the metadata")]
    DuplicateMatch(String),
    #[error("points reference match `{0}` which has no metadata")]
    OrphanPoints(String),
    #[error("dataset file: {0}")]
    DatasetFormat(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = IngestError> = std::result::Result<T, E>;
