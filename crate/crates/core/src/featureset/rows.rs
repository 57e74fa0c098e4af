use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::accumulate::{accumulate, accumulated_names};
use super::perspective::to_server_perspective;
use super::state::shift_outcomes;
use super::Result;
use crate::ingest::{MergedDataset, MergedMatch};

/// Context columns known when the serve is struck. Accumulated columns follow.
const CONTEXT_COLUMNS: [&str; 17] = [
    "SetNo",
    "GameNo",
    "PointNumber",
    "Tiebreak",
    "BreakPointPending",
    "P1Score",
    "P2Score",
    "P1GamesWon",
    "P2GamesWon",
    "P1SetsWon",
    "P2SetsWon",
    "P1PointsWon",
    "P2PointsWon",
    "P1Rank",
    "P2Rank",
    "P1Unranked",
    "P2Unranked",
];

const CATEGORICAL_COLUMNS: [&str; 4] = ["ServeWidth", "ServeDepth", "Surface", "Tournament"];

/// Column names of a row, before encoding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowLayout {
    pub numeric: Vec<String>,
    pub categorical: Vec<String>,
}

impl RowLayout {
    pub fn numeric_index(&self, name: &str) -> Option<usize> {
        self.numeric.iter().position(|n| n == name)
    }

    pub fn categorical_index(&self, name: &str) -> Option<usize> {
        self.categorical.iter().position(|n| n == name)
    }
}

/// The frozen column layout of prepared rows.
pub fn canonical_layout() -> RowLayout {
    let mut numeric: Vec<String> = CONTEXT_COLUMNS.iter().map(|s| s.to_string()).collect();
    numeric.extend(accumulated_names());
    RowLayout {
        numeric,
        categorical: CATEGORICAL_COLUMNS.iter().map(|s| s.to_string()).collect(),
    }
}

/// A row in the published P1/P2 orientation, before the server swap.
#[derive(Clone, Debug, PartialEq)]
pub struct PointRow {
    pub match_id: Arc<str>,
    pub point_number: u32,
    pub serve_number: u8,
    pub point_server: u8,
    pub point_winner: u8,
    pub numeric: Vec<f64>,
    pub categorical: Vec<Option<String>>,
}

/// One leak-free training row. Player 1 is the server; `label` is 1 when the
/// server won the point.
#[derive(Clone, Debug, PartialEq)]
pub struct PreparedRow {
    pub match_id: Arc<str>,
    pub point_number: u32,
    pub serve_number: u8,
    pub label: u8,
    pub numeric: Vec<f64>,
    pub categorical: Vec<Option<String>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PreparedSet {
    pub layout: RowLayout,
    pub rows: Vec<PreparedRow>,
}

impl PreparedSet {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Distinct match ids in row order.
    pub fn match_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = Vec::new();
        for r in &self.rows {
            if ids.last().map(String::as_str) != Some(&*r.match_id) {
                ids.push(r.match_id.to_string());
            }
        }
        ids
    }

    /// Rows whose match id satisfies `keep`, in order.
    pub fn filter_matches(&self, keep: impl Fn(&str) -> bool) -> PreparedSet {
        PreparedSet {
            layout: self.layout.clone(),
            rows: self.rows.iter().filter(|r| keep(&r.match_id)).cloned().collect(),
        }
    }

    /// Share of rows won by the server.
    pub fn server_win_rate(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        self.rows.iter().map(|r| f64::from(r.label)).sum::<f64>() / self.rows.len() as f64
    }
}

/// Builds the rows of one match. Double faults take part in the accumulated
/// history either way; `keep_double_faults` decides whether they become rows.
pub fn prepare_match(m: &MergedMatch, keep_double_faults: bool) -> Result<Vec<PreparedRow>> {
    let acc = accumulate(&m.points)?;
    let states = shift_outcomes(&m.points, &|set| m.meta.tiebreak_at(set))?;
    let layout = canonical_layout();
    let id: Arc<str> = Arc::from(m.meta.match_id.as_str());
    let ranks = [m.p1_rank, m.p2_rank];

    let mut rows = Vec::with_capacity(m.points.len());
    for ((p, st), acc_row) in m.points.iter().zip(&states).zip(&acc.rows) {
        let Some(serve_number) = p.serve_number.filter(|s| matches!(s, 1 | 2)) else {
            log::warn!("{}: point {} has no serve number, skipped", p.match_id, p.point_label);
            continue;
        };
        if p.is_double_fault() && !keep_double_faults {
            continue;
        }
        let mut numeric = Vec::with_capacity(layout.numeric.len());
        numeric.extend([
            f64::from(p.set_no),
            f64::from(p.game_no),
            f64::from(p.point_number),
            f64::from(u8::from(st.tiebreak)),
            f64::from(u8::from(st.break_point_pending(p.point_server))),
            st.score[0],
            st.score[1],
            f64::from(st.games[0]),
            f64::from(st.games[1]),
            f64::from(st.sets[0]),
            f64::from(st.sets[1]),
            f64::from(st.points_won[0]),
            f64::from(st.points_won[1]),
            f64::from(ranks[0].rank),
            f64::from(ranks[1].rank),
            f64::from(u8::from(!ranks[0].ranked)),
            f64::from(u8::from(!ranks[1].ranked)),
        ]);
        numeric.extend_from_slice(acc_row);
        debug_assert_eq!(numeric.len(), layout.numeric.len());
        rows.push(PointRow {
            match_id: Arc::clone(&id),
            point_number: p.point_number,
            serve_number,
            point_server: p.point_server,
            point_winner: p.point_winner,
            numeric,
            categorical: vec![
                p.serve_width.map(|w| w.code().to_string()),
                p.serve_depth.map(|d| d.code().to_string()),
                Some(m.meta.surface.name().to_string()),
                Some(m.meta.tournament.code().to_string()),
            ],
        });
    }
    to_server_perspective(rows, &layout)
}

/// Prepares every match in parallel; rows come back in match-id order.
pub fn prepare_dataset(dataset: &MergedDataset, keep_double_faults: bool) -> Result<PreparedSet> {
    let mut order: Vec<&MergedMatch> = dataset.matches.iter().collect();
    order.sort_by(|a, b| a.meta.match_id.cmp(&b.meta.match_id));
    let per_match: Vec<Vec<PreparedRow>> = order
        .par_iter()
        .map(|m| prepare_match(m, keep_double_faults))
        .collect::<Result<_>>()?;
    Ok(PreparedSet {
        layout: canonical_layout(),
        rows: per_match.into_iter().flatten().collect(),
    })
}

/// Partition into (first-serve, second-serve) rows.
pub fn split_by_serve(set: &PreparedSet) -> (PreparedSet, PreparedSet) {
    let (first, second): (Vec<_>, Vec<_>) = set.rows.iter().cloned().partition(|r| r.serve_number == 1);
    (
        PreparedSet {
            layout: set.layout.clone(),
            rows: first,
        },
        PreparedSet {
            layout: set.layout.clone(),
            rows: second,
        },
    )
}
