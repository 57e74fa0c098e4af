//! Descriptive statistics and chart artifacts.
//!
//! Placement grids count successful serves by (ServeWidth, ServeDepth) for a
//! serve number and service court. The court is not a raw column: it follows
//! from the number of points already played in the game (even → deuce).
//! Charts are standalone SVG documents whose bytes depend only on their
//! inputs, style and stamp.

mod importance;
mod placement;
mod svg;
mod winrate;

pub use importance::{ImportanceReport, DEFAULT_IMPORTANCE_THRESHOLD};
pub use placement::{courts, placement_grids, Court, PlacementGrid, SidelineCells};
pub use svg::{render_bar_chart, render_court_heatmap, SvgStyle};
pub use winrate::WinRateSummary;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("nothing selected: {0}")]
    EmptySelection(String),
}

pub type Result<T, E = AnalysisError> = std::result::Result<T, E>;
