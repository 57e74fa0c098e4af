use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{AnalysisError, Result};
use crate::ingest::{RawPoint, ServeDepth, ServeWidth};

/// Service court the serve goes into, seen from the server.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Court {
    Deuce,
    Ad,
}

impl Court {
    pub const ALL: [Court; 2] = [Court::Ad, Court::Deuce];

    /// Even number of points already played in the game → deuce court.
    pub fn from_points_played(n: u32) -> Self {
        if n % 2 == 0 {
            Court::Deuce
        } else {
            Court::Ad
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Court::Deuce => "deuce",
            Court::Ad => "AD",
        }
    }
}

impl fmt::Display for Court {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Court {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "deuce" => Ok(Court::Deuce),
            "ad" => Ok(Court::Ad),
            other => Err(format!("unknown court {other:?}")),
        }
    }
}

/// Court of every point, for points grouped by match and ordered within it
/// (as [`crate::ingest::MergedDataset::points`] yields them).
pub fn courts<'a>(points: impl IntoIterator<Item = &'a RawPoint>) -> Vec<Court> {
    let mut out = Vec::new();
    let mut game: Option<(&str, u32, u32)> = None;
    let mut played = 0;
    for p in points {
        let key = (p.match_id.as_str(), p.set_no, p.game_no);
        if game != Some(key) {
            game = Some(key);
            played = 0;
        }
        out.push(Court::from_points_played(played));
        played += 1;
    }
    out
}

/// Serve placement frequencies: rows follow [`ServeWidth::ALL`], columns
/// [`ServeDepth::ALL`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlacementGrid {
    pub serve_number: Option<u8>,
    pub court: Option<Court>,
    pub counts: [[u64; 2]; 5],
    pub total: u64,
}

fn width_index(w: ServeWidth) -> usize {
    ServeWidth::ALL.iter().position(|x| *x == w).expect("listed")
}

fn depth_index(d: ServeDepth) -> usize {
    ServeDepth::ALL.iter().position(|x| *x == d).expect("listed")
}

impl PlacementGrid {
    /// Counts successful serves (placement present, no double fault)
    /// matching `serve_number` and `court`; `None` selects all.
    pub fn from_points<'a>(
        points: impl IntoIterator<Item = &'a RawPoint>,
        serve_number: Option<u8>,
        court: Option<Court>,
    ) -> Result<Self> {
        let points: Vec<&RawPoint> = points.into_iter().collect();
        let sides = courts(points.iter().copied());
        let mut grid = Self {
            serve_number,
            court,
            counts: [[0; 2]; 5],
            total: 0,
        };
        for (p, side) in points.iter().zip(sides) {
            if p.is_double_fault() || serve_number.is_some_and(|s| p.serve_number != Some(s)) {
                continue;
            }
            if court.is_some_and(|c| c != side) {
                continue;
            }
            if let (Some(w), Some(d)) = (p.serve_width, p.serve_depth) {
                grid.counts[width_index(w)][depth_index(d)] += 1;
                grid.total += 1;
            }
        }
        if grid.total == 0 {
            return Err(AnalysisError::EmptySelection(grid.label()));
        }
        Ok(grid)
    }

    pub fn label(&self) -> String {
        let serve = match self.serve_number {
            Some(1) => "first serve".to_string(),
            Some(2) => "second serve".to_string(),
            Some(n) => format!("serve {n}"),
            None => "all serves".to_string(),
        };
        match self.court {
            Some(c) => format!("{serve}, {c} court"),
            None => serve,
        }
    }

    /// Percentage of the selection in one cell.
    pub fn percent(&self, width: ServeWidth, depth: ServeDepth) -> f64 {
        100.0 * self.counts[width_index(width)][depth_index(depth)] as f64 / self.total as f64
    }

    /// All ten cells as (width, depth, percent), widths outermost.
    pub fn cells(&self) -> Vec<(ServeWidth, ServeDepth, f64)> {
        ServeWidth::ALL
            .iter()
            .flat_map(|&w| ServeDepth::ALL.iter().map(move |&d| (w, d)))
            .map(|(w, d)| (w, d, self.percent(w, d)))
            .collect()
    }

    /// Summed percentage over the given widths, both depths.
    pub fn width_share(&self, widths: &[ServeWidth]) -> f64 {
        let n: u64 = widths.iter().map(|&w| self.counts[width_index(w)].iter().sum::<u64>()).sum();
        100.0 * n as f64 / self.total as f64
    }

    pub fn depth_share(&self, depth: ServeDepth) -> f64 {
        let n: u64 = self.counts.iter().map(|row| row[depth_index(depth)]).sum();
        100.0 * n as f64 / self.total as f64
    }

    /// Grid over the union of two disjoint selections.
    pub fn merge(&self, other: &Self) -> Self {
        let mut counts = self.counts;
        for (row, o) in counts.iter_mut().zip(&other.counts) {
            row[0] += o[0];
            row[1] += o[1];
        }
        Self {
            serve_number: if self.serve_number == other.serve_number { self.serve_number } else { None },
            court: if self.court == other.court { self.court } else { None },
            counts,
            total: self.total + other.total,
        }
    }

    /// Tab-separated `width depth count percent` listing.
    pub fn to_tsv(&self) -> String {
        let mut s = format!("# {} ({} serves)\nwidth\tdepth\tcount\tpercent\n", self.label(), self.total);
        for (w, d, pct) in self.cells() {
            s.push_str(&format!("{w}\t{d}\t{}\t{pct:.2}\n", self.counts[width_index(w)][depth_index(d)]));
        }
        s
    }
}

/// Widths that count as "close to the sidelines".
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SidelineCells {
    pub widths: Vec<ServeWidth>,
}

impl Default for SidelineCells {
    fn default() -> Self {
        Self {
            widths: vec![ServeWidth::W, ServeWidth::BW],
        }
    }
}

impl SidelineCells {
    pub fn describe(&self) -> String {
        let codes: Vec<&str> = self.widths.iter().map(|w| w.code()).collect();
        format!("width in {{{}}}", codes.join(", "))
    }
}

impl FromStr for SidelineCells {
    type Err = String;

    /// Comma-separated width codes, e.g. `W,BW`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let widths = s
            .split(',')
            .map(|c| c.parse::<ServeWidth>())
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if widths.is_empty() {
            return Err("empty sideline set".into());
        }
        Ok(Self { widths })
    }
}

/// The four serve-number × court grids, first serve before second, AD before
/// deuce.
pub fn placement_grids<'a>(points: impl IntoIterator<Item = &'a RawPoint> + Clone) -> Result<Vec<PlacementGrid>> {
    let mut out = Vec::with_capacity(4);
    for serve in [1, 2] {
        for court in Court::ALL {
            out.push(PlacementGrid::from_points(points.clone(), Some(serve), Some(court))?);
        }
    }
    Ok(out)
}
