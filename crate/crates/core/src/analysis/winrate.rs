use serde::{Deserialize, Serialize};

use super::{AnalysisError, Result};
use crate::featureset::PreparedRow;
use crate::ingest::RawPoint;

/// Server win counts and rates. The conditionals use successful serves of
/// each number; `overall` uses every point, double faults included.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WinRateSummary {
    pub first_won: u64,
    pub first_total: u64,
    pub second_won: u64,
    pub second_total: u64,
    pub overall_won: u64,
    pub overall_total: u64,
}

fn rate(won: u64, total: u64) -> f64 {
    if total == 0 {
        0.0
    } else {
        won as f64 / total as f64
    }
}

impl WinRateSummary {
    pub fn p_first(&self) -> f64 {
        rate(self.first_won, self.first_total)
    }

    pub fn p_second(&self) -> f64 {
        rate(self.second_won, self.second_total)
    }

    pub fn p_overall(&self) -> f64 {
        rate(self.overall_won, self.overall_total)
    }

    /// Win rate over successful serves of either number.
    pub fn p_in_play(&self) -> f64 {
        rate(self.first_won + self.second_won, self.first_total + self.second_total)
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a RawPoint>) -> Result<Self> {
        let mut s = Self::default();
        for p in points {
            let won = u64::from(p.point_winner == p.point_server);
            s.overall_total += 1;
            s.overall_won += won;
            if p.is_double_fault() {
                continue;
            }
            match p.serve_number {
                Some(1) => {
                    s.first_total += 1;
                    s.first_won += won;
                }
                Some(2) => {
                    s.second_total += 1;
                    s.second_won += won;
                }
                _ => {}
            }
        }
        s.check()
    }

    /// Same summary from server-perspective rows. `successful` must come
    /// from preparation without double faults, `all` from preparation that
    /// keeps them.
    pub fn from_prepared(successful: &[PreparedRow], all: &[PreparedRow]) -> Result<Self> {
        let mut s = Self::default();
        for r in successful {
            let won = u64::from(r.label);
            match r.serve_number {
                1 => {
                    s.first_total += 1;
                    s.first_won += won;
                }
                2 => {
                    s.second_total += 1;
                    s.second_won += won;
                }
                _ => {}
            }
        }
        s.overall_total = all.len() as u64;
        s.overall_won = all.iter().map(|r| u64::from(r.label)).sum();
        s.check()
    }

    fn check(self) -> Result<Self> {
        if self.overall_total == 0 {
            return Err(AnalysisError::EmptySelection("win rates over no points".into()));
        }
        Ok(self)
    }

    pub fn to_tsv(&self) -> String {
        format!(
            "selection\twon\ttotal\trate\n\
             first serve in\t{}\t{}\t{:.4}\n\
             second serve in\t{}\t{}\t{:.4}\n\
             all points\t{}\t{}\t{:.4}\n",
            self.first_won,
            self.first_total,
            self.p_first(),
            self.second_won,
            self.second_total,
            self.p_second(),
            self.overall_won,
            self.overall_total,
            self.p_overall()
        )
    }
}
