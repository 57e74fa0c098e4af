use std::collections::{BTreeMap, HashMap};
use std::io::Read;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::matches::parse_date;
use super::{IngestError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankLookup {
    Ranked { rank: u32, as_of: NaiveDate },
    NotRanked,
}

impl RankLookup {
    pub fn rank(self) -> Option<u32> {
        match self {
            RankLookup::Ranked { rank, .. } => Some(rank),
            RankLookup::NotRanked => None,
        }
    }
}

/// A player's rank attached to a match. Unranked players carry the sentinel
/// rank (one past the worst rank in the table) with `ranked = false`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankAtMatch {
    pub rank: u32,
    pub ranked: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Snapshot {
    date: NaiveDate,
    rank: u32,
}

/// ATP ranking history plus the player directory used to resolve names.
#[derive(Clone, Debug, Default)]
pub struct RankingTable {
    history: HashMap<u32, Vec<Snapshot>>,
    names: HashMap<String, Vec<u32>>,
    max_rank: u32,
    warnings: Vec<String>,
}

impl RankingTable {
    /// Latest rank on or before `date`.
    pub fn lookup(&self, player_id: u32, date: NaiveDate) -> RankLookup {
        let Some(snaps) = self.history.get(&player_id) else {
            return RankLookup::NotRanked;
        };
        let idx = snaps.partition_point(|s| s.date <= date);
        match idx {
            0 => RankLookup::NotRanked,
            i => RankLookup::Ranked {
                rank: snaps[i - 1].rank,
                as_of: snaps[i - 1].date,
            },
        }
    }

    /// Looks a player up by display name. Homonyms resolve to the best rank.
    pub fn lookup_name(&self, name: &str, date: NaiveDate) -> RankLookup {
        self.names
            .get(&canonical_name(name))
            .into_iter()
            .flatten()
            .map(|&id| self.lookup(id, date))
            .filter_map(|r| match r {
                RankLookup::Ranked { rank, as_of } => Some((rank, as_of)),
                RankLookup::NotRanked => None,
            })
            .min_by_key(|(rank, _)| *rank)
            .map_or(RankLookup::NotRanked, |(rank, as_of)| RankLookup::Ranked { rank, as_of })
    }

    /// Rank at match time with the not-ranked sentinel applied.
    pub fn rank_at_match(&self, name: &str, date: NaiveDate) -> RankAtMatch {
        match self.lookup_name(name, date) {
            RankLookup::Ranked { rank, .. } => RankAtMatch { rank, ranked: true },
            RankLookup::NotRanked => RankAtMatch {
                rank: self.sentinel_rank(),
                ranked: false,
            },
        }
    }

    pub fn sentinel_rank(&self) -> u32 {
        self.max_rank + 1
    }

    pub fn max_rank(&self) -> u32 {
        self.max_rank
    }

    /// Duplicate-entry warnings collected while parsing.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn player_count(&self) -> usize {
        self.history.len()
    }

    /// Adds a snapshot; used by the parser and by simulated data.
    pub fn insert(&mut self, player_id: u32, date: NaiveDate, rank: u32) {
        let snaps = self.history.entry(player_id).or_default();
        match snaps.binary_search_by_key(&date, |s| s.date) {
            Ok(i) => {
                let kept = snaps[i].rank.min(rank);
                let msg = format!(
                    "duplicate ranking entry for player {player_id} on {date}: ranks {} and {rank}, keeping {kept}",
                    snaps[i].rank
                );
                log::warn!("{msg}");
                self.warnings.push(msg);
                snaps[i].rank = kept;
            }
            Err(i) => snaps.insert(i, Snapshot { date, rank }),
        }
        self.max_rank = self.max_rank.max(rank);
    }

    pub fn add_player(&mut self, player_id: u32, name: &str) {
        let ids = self.names.entry(canonical_name(name)).or_default();
        if !ids.contains(&player_id) {
            ids.push(player_id);
            ids.sort_unstable();
        }
    }
}

/// Lower-case, punctuation-free, single-spaced form used to join names across
/// sources.
pub fn canonical_name(name: &str) -> String {
    name.chars()
        .map(|c| if c == '-' || c == '.' || c == '\'' { ' ' } else { c })
        .collect::<String>()
        .split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses ranking snapshots (`ranking_date,rank,player[,points]`) and the
/// player directory (`player_id,name_first,name_last,...`). Header rows are
/// optional in both.
pub fn parse_rankings<R: Read, P: Read>(sources: impl IntoIterator<Item = R>, players: P) -> Result<RankingTable> {
    let mut table = RankingTable::default();
    for source in sources {
        let mut staged: BTreeMap<(u32, NaiveDate), Vec<u32>> = BTreeMap::new();
        for_each_row(source, 3, |line, rec| {
            let date = parse_date(rec[0].trim()).ok_or_else(|| invalid(line, "ranking_date", &rec[0]))?;
            let rank: u32 = rec[1]
                .trim()
                .parse()
                .ok()
                .filter(|r| *r >= 1)
                .ok_or_else(|| invalid(line, "rank", &rec[1]))?;
            let player: u32 = rec[2].trim().parse().map_err(|_| invalid(line, "player", &rec[2]))?;
            staged.entry((player, date)).or_default().push(rank);
            Ok(())
        })?;
        for ((player, date), ranks) in staged {
            for rank in ranks {
                table.insert(player, date, rank);
            }
        }
    }
    for_each_row(players, 3, |line, rec| {
        let id: u32 = rec[0].trim().parse().map_err(|_| invalid(line, "player_id", &rec[0]))?;
        let name = format!("{} {}", rec[1].trim(), rec[2].trim());
        table.add_player(id, &name);
        Ok(())
    })?;
    Ok(table)
}

fn invalid(line: u64, column: &str, value: &str) -> IngestError {
    IngestError::InvalidValue {
        line,
        column: column.to_string(),
        value: value.to_string(),
    }
}

/// Runs `f` on every data row with at least `min_fields` fields. A first row
/// whose leading cell is not numeric is taken as a header.
fn for_each_row<R: Read>(
    source: R,
    min_fields: usize,
    mut f: impl FnMut(u64, &csv::StringRecord) -> Result<()>,
) -> Result<()> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source);
    let mut record = csv::StringRecord::new();
    let mut first = true;
    while reader.read_record(&mut record)? {
        let line = record.position().map_or(0, |p| p.line());
        if first {
            first = false;
            let lead = record.get(0).unwrap_or("").trim();
            if !lead.bytes().next().is_some_and(|b| b.is_ascii_digit()) {
                continue;
            }
        }
        if record.len() < min_fields {
            return Err(IngestError::MalformedRow {
                line,
                expected: min_fields,
                found: record.len(),
            });
        }
        f(line, &record)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    const PLAYERS: &str = "player_id,name_first,name_last,hand,dob,ioc\n\
        104925,Novak,Djokovic,R,19870522,SRB\n\
        105223,Juan Martin,del Potro,R,19880923,ARG\n\
        200000,Nobody,Ranked,R,19900101,XXX\n";

    #[test]
    fn latest_on_or_before() {
        let ranks = "ranking_date,rank,player,points\n20190624,3,105223,3000\n";
        let t = parse_rankings([ranks.as_bytes()], PLAYERS.as_bytes()).unwrap();
        assert_eq!(t.lookup(105223, date(2019, 7, 1)).rank(), Some(3));
        assert_eq!(t.lookup(105223, date(2019, 6, 1)), RankLookup::NotRanked);
        assert_eq!(t.lookup_name("Juan Martin Del Potro", date(2019, 7, 1)).rank(), Some(3));
    }

    #[test]
    fn absent_player_is_not_ranked() {
        let ranks = "20190624,3,105223,3000\n";
        let t = parse_rankings([ranks.as_bytes()], PLAYERS.as_bytes()).unwrap();
        assert_eq!(t.lookup_name("Nobody Ranked", date(2019, 7, 1)), RankLookup::NotRanked);
        assert_eq!(t.lookup_name("Not In Directory", date(2019, 7, 1)), RankLookup::NotRanked);
        let at = t.rank_at_match("Nobody Ranked", date(2019, 7, 1));
        assert_eq!(at, RankAtMatch { rank: 4, ranked: false });
    }

    #[test]
    fn two_snapshots_across_files() {
        // Rank 5 in January, rank 4 in June; a March query sees January.
        let jan = "20190107,5,104925,9000\n";
        let jun = "20190603,4,104925,9100\n";
        let t = parse_rankings([jan.as_bytes(), jun.as_bytes()], PLAYERS.as_bytes()).unwrap();
        assert_eq!(t.lookup(104925, date(2019, 3, 15)).rank(), Some(5));
        assert_eq!(t.lookup(104925, date(2019, 6, 3)).rank(), Some(4));
    }

    #[test]
    fn duplicate_entry_keeps_better_rank() {
        let ranks = "20190107,7,104925,\n20190107,2,104925,\n";
        let t = parse_rankings([ranks.as_bytes()], PLAYERS.as_bytes()).unwrap();
        assert_eq!(t.lookup(104925, date(2019, 1, 8)).rank(), Some(2));
        assert_eq!(t.warnings().len(), 1);
    }

    #[test]
    fn rank_zero_rejected() {
        let ranks = "20190107,0,104925,\n";
        assert!(matches!(
            parse_rankings([ranks.as_bytes()], PLAYERS.as_bytes()),
            Err(IngestError::InvalidValue { .. })
        ));
    }

    #[test]
    fn short_row_is_malformed() {
        let ranks = "20190107,7\n";
        assert!(matches!(
            parse_rankings([ranks.as_bytes()], PLAYERS.as_bytes()),
            Err(IngestError::MalformedRow { line: 1, .. })
        ));
    }

    #[test]
    fn name_canonicalization() {
        assert_eq!(canonical_name("  Jo-Wilfried   TSONGA "), "jo wilfried tsonga");
        assert_eq!(canonical_name("Stan Wawrinka"), canonical_name("stan  wawrinka"));
    }
}
