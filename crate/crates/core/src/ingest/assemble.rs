use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::matches::{Gender, MatchMeta};
use super::points::RawPoint;
use super::rankings::{RankAtMatch, RankingTable};
use super::tournament::Tournament;
use super::{IngestError, Result};

/// Which matches survive assembly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scope {
    pub tournaments: BTreeSet<Tournament>,
    pub years: BTreeSet<i32>,
    pub gender: Gender,
}

impl Default for Scope {
    /// Men's singles at Wimbledon and the US Open, 2016 through 2020: the
    /// editions that carry serve and return placement.
    fn default() -> Self {
        Self {
            tournaments: [Tournament::Wimbledon, Tournament::UsOpen].into_iter().collect(),
            years: (2016..=2020).collect(),
            gender: Gender::Men,
        }
    }
}

impl Scope {
    fn rejects(&self, meta: &MatchMeta) -> Option<&'static str> {
        if !self.tournaments.contains(&meta.tournament) {
            Some("out of scope: tournament")
        } else if !self.years.contains(&meta.year) {
            Some("out of scope: year")
        } else if meta.gender != self.gender {
            Some("out of scope: gender")
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub match_id: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MergedMatch {
    pub meta: MatchMeta,
    /// Ordered by `(set_no, game_no, point_number)`.
    pub points: Vec<RawPoint>,
    pub p1_rank: RankAtMatch,
    pub p2_rank: RankAtMatch,
}

impl MergedMatch {
    pub fn rank_of(&self, player: u8) -> RankAtMatch {
        if player == 1 {
            self.p1_rank
        } else {
            self.p2_rank
        }
    }
}

/// Scope-filtered matches sorted by match id, with the reasons every other
/// match was dropped.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MergedDataset {
    pub matches: Vec<MergedMatch>,
    pub exclusions: Vec<Exclusion>,
}

impl MergedDataset {
    pub fn point_count(&self) -> usize {
        self.matches.iter().map(|m| m.points.len()).sum()
    }

    pub fn match_ids(&self) -> Vec<String> {
        self.matches.iter().map(|m| m.meta.match_id.clone()).collect()
    }

    pub fn get(&self, match_id: &str) -> Option<&MergedMatch> {
        self.matches
            .binary_search_by(|m| m.meta.match_id.as_str().cmp(match_id))
            .ok()
            .map(|i| &self.matches[i])
    }

    /// All retained points, match by match.
    pub fn points(&self) -> impl Iterator<Item = &RawPoint> {
        self.matches.iter().flat_map(|m| m.points.iter())
    }

    pub fn metas(&self) -> Vec<MatchMeta> {
        self.matches.iter().map(|m| m.meta.clone()).collect()
    }
}

/// Rewrites point match ids through an explicit alias map (point-file id →
/// metadata id) before assembly.
pub fn apply_id_overrides(points: &mut [RawPoint], overrides: &HashMap<String, String>) {
    if overrides.is_empty() {
        return;
    }
    for p in points {
        if let Some(target) = overrides.get(&p.match_id) {
            p.match_id = target.clone();
        }
    }
}

/// Merges parsed points, match metadata and rankings.
///
/// Rows with `PointWinner = 0` are dropped. A match is dropped as a whole
/// when it is out of scope, has no points, or any successfully served point
/// lacks its serve placement. Ranks are taken at the tournament start date.
pub fn assemble_dataset(
    points: Vec<RawPoint>,
    matches: &[MatchMeta],
    rankings: &RankingTable,
    scope: &Scope,
) -> Result<MergedDataset> {
    if scope.tournaments.is_empty() || scope.years.is_empty() {
        return Err(IngestError::EmptyScope);
    }
    let mut metas: BTreeMap<&str, &MatchMeta> = BTreeMap::new();
    for m in matches {
        if metas.insert(m.match_id.as_str(), m).is_some() {
            return Err(IngestError::DuplicateMatch(m.match_id.clone()));
        }
    }
    let mut by_match: BTreeMap<String, Vec<RawPoint>> = BTreeMap::new();
    for p in points {
        by_match.entry(p.match_id.clone()).or_default().push(p);
    }
    if let Some(orphan) = by_match.keys().find(|id| !metas.contains_key(id.as_str())) {
        return Err(IngestError::OrphanPoints(orphan.clone()));
    }

    let mut out = MergedDataset::default();
    for (id, meta) in metas {
        let exclude = |out: &mut MergedDataset, reason: &str| {
            out.exclusions.push(Exclusion {
                match_id: id.to_string(),
                reason: reason.to_string(),
            })
        };
        if let Some(reason) = scope.rejects(meta) {
            exclude(&mut out, reason);
            continue;
        }
        let mut pts: Vec<RawPoint> = by_match
            .remove(id)
            .unwrap_or_default()
            .into_iter()
            .filter(|p| p.point_winner != 0)
            .collect();
        if pts.is_empty() {
            exclude(&mut out, "no points");
            continue;
        }
        pts.sort_by_key(|p| (p.set_no, p.game_no, p.point_number));
        if let Some(reason) = point_defect(&pts) {
            exclude(&mut out, reason);
            continue;
        }
        out.matches.push(MergedMatch {
            p1_rank: rankings.rank_at_match(&meta.player1_name, meta.start_date),
            p2_rank: rankings.rank_at_match(&meta.player2_name, meta.start_date),
            meta: meta.clone(),
            points: pts,
        });
    }
    if out.matches.is_empty() {
        return Err(IngestError::EmptyScope);
    }
    Ok(out)
}

fn point_defect(points: &[RawPoint]) -> Option<&'static str> {
    if points
        .windows(2)
        .any(|w| (w[0].set_no, w[0].game_no, w[0].point_number) == (w[1].set_no, w[1].game_no, w[1].point_number))
    {
        return Some("duplicate point");
    }
    for p in points {
        if !matches!(p.point_server, 1 | 2) {
            return Some("invalid point server");
        }
        if !matches!(p.serve_number, Some(1 | 2)) {
            return Some("missing serve number");
        }
        if !p.is_double_fault() && !p.has_serve_placement() {
            return Some("missing serve placement");
        }
    }
    None
}
