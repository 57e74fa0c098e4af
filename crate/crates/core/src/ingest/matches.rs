use std::collections::HashMap;
use std::io::Read;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::tournament::{Surface, Tournament};
use super::{IngestError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Gender {
    Men,
    Women,
    Unknown,
}

impl Gender {
    pub fn code(self) -> &'static str {
        match self {
            Gender::Men => "men",
            Gender::Women => "women",
            Gender::Unknown => "unknown",
        }
    }

    pub fn from_code(s: &str) -> Option<Self> {
        match s {
            "men" => Some(Gender::Men),
            "women" => Some(Gender::Women),
            "unknown" => Some(Gender::Unknown),
            _ => None,
        }
    }
}

/// Match-level metadata from the companion `*-matches.csv` files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchMeta {
    pub match_id: String,
    pub tournament: Tournament,
    pub year: i32,
    pub surface: Surface,
    pub player1_name: String,
    pub player2_name: String,
    pub gender: Gender,
    /// Used as the ranking snapshot date.
    pub start_date: NaiveDate,
}

impl MatchMeta {
    /// Men play best of five sets at the slams, women best of three.
    pub fn best_of(&self) -> u32 {
        if self.gender == Gender::Women {
            3
        } else {
            5
        }
    }

    /// Games-all score at which set `set_no` goes to a tiebreak.
    pub fn tiebreak_at(&self, set_no: u32) -> Option<u32> {
        let set = if set_no == self.best_of() { 5 } else { set_no.min(4) };
        self.tournament.tiebreak_at(self.year, set)
    }
}

/// Parses a header-first match metadata file.
///
/// Required columns: `match_id`, `player1`, `player2`. Tournament and year
/// come from the `slam` / `year` columns when present, otherwise from the
/// `<year>-<slam>-<number>` match id. Gender comes from `event_name` when it
/// names the draw, otherwise from the draw number (1xxx men, 2xxx women).
/// An optional `start_date` column (YYYY-MM-DD or YYYYMMDD) overrides the
/// tabulated tournament start.
pub fn parse_matches_file<R: Read>(source: R) -> Result<Vec<MatchMeta>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(source);
    let headers = reader.headers()?.clone();
    let by_name: HashMap<String, usize> = headers
        .iter()
        .enumerate()
        .map(|(i, h)| (h.trim().to_ascii_lowercase(), i))
        .collect();
    let required = |name: &str| {
        by_name
            .get(name)
            .copied()
            .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
    };
    let id_col = required("match_id")?;
    let p1_col = required("player1")?;
    let p2_col = required("player2")?;
    let optional = |name: &str| by_name.get(name).copied();
    let slam_col = optional("slam");
    let year_col = optional("year");
    let num_col = optional("match_num");
    let event_col = optional("event_name");
    let date_col = optional("start_date");

    let mut out = Vec::new();
    let mut record = csv::StringRecord::new();
    while reader.read_record(&mut record)? {
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != headers.len() {
            return Err(IngestError::MalformedRow {
                line,
                expected: headers.len(),
                found: record.len(),
            });
        }
        let cell = |c: Option<usize>| c.map(|i| record[i].trim()).filter(|s| !s.is_empty());
        let invalid = |c: usize| IngestError::InvalidValue {
            line,
            column: headers[c].to_string(),
            value: record[c].to_string(),
        };
        let match_id = record[id_col].trim().to_string();
        let id_parts = split_match_id(&match_id);

        let tournament = match cell(slam_col).or(id_parts.map(|p| p.1)) {
            Some(code) => code.parse::<Tournament>()?,
            None => return Err(IngestError::UnknownTournament(match_id)),
        };
        let year = match (cell(year_col), id_parts) {
            (Some(y), _) => y.parse::<i32>().map_err(|_| invalid(year_col.unwrap()))?,
            (None, Some((y, _, _))) => y.parse::<i32>().map_err(|_| invalid(id_col))?,
            (None, None) => return Err(invalid(id_col)),
        };
        let match_num = cell(num_col).or(id_parts.map(|p| p.2));
        let gender = derive_gender(cell(event_col), match_num);
        let start_date = match cell(date_col) {
            Some(d) => parse_date(d).ok_or_else(|| invalid(date_col.unwrap()))?,
            None => tournament.start_date(year),
        };
        out.push(MatchMeta {
            match_id,
            tournament,
            year,
            surface: tournament.surface(),
            player1_name: record[p1_col].trim().to_string(),
            player2_name: record[p2_col].trim().to_string(),
            gender,
            start_date,
        });
    }
    Ok(out)
}

/// `2019-wimbledon-1101` → `("2019", "wimbledon", "1101")`.
fn split_match_id(id: &str) -> Option<(&str, &str, &str)> {
    let mut parts = id.splitn(3, '-');
    let year = parts.next()?;
    let slam = parts.next()?;
    let num = parts.next()?;
    (year.len() == 4 && year.bytes().all(|b| b.is_ascii_digit())).then_some((year, slam, num))
}

fn derive_gender(event_name: Option<&str>, match_num: Option<&str>) -> Gender {
    if let Some(event) = event_name.map(str::to_ascii_lowercase) {
        if ["women", "ladies", "girls"].iter().any(|k| event.contains(k)) {
            return Gender::Women;
        }
        if ["men", "gentlemen", "boys"].iter().any(|k| event.contains(k)) {
            return Gender::Men;
        }
    }
    let leading = match_num.and_then(|n| n.trim().chars().next());
    match (leading, match_num.map(str::len)) {
        (Some('1'), Some(4)) => Gender::Men,
        (Some('2'), Some(4)) => Gender::Women,
        _ => Gender::Unknown,
    }
}

pub(crate) fn parse_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .or_else(|_| NaiveDate::parse_from_str(s, "%Y%m%d"))
        .ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "match_id,year,slam,match_num,player1,player2,status,winner,event_name,round,court_name,court_id,player1id,player2id,nation1,nation2";

    #[test]
    fn wimbledon_mens_match() {
        let text = format!(
            "{HEADER}\n2019-wimbledon-1101,2019,wimbledon,1101,Novak Djokovic,Philipp Kohlschreiber,Completed,1,,,,,,,SRB,GER\n"
        );
        let metas = parse_matches_file(text.as_bytes()).unwrap();
        assert_eq!(metas.len(), 1);
        let m = &metas[0];
        assert_eq!(m.tournament, Tournament::Wimbledon);
        assert_eq!(m.year, 2019);
        assert_eq!(m.gender, Gender::Men);
        assert_eq!(m.surface, Surface::Grass);
        assert_eq!(m.start_date, NaiveDate::from_ymd_opt(2019, 7, 1).unwrap());
    }

    #[test]
    fn five_rows_five_records_including_out_of_scope() {
        let rows = [
            "2019-wimbledon-1101,2019,wimbledon,1101,A B,C D,,,,,,,,,,",
            "2019-wimbledon-2101,2019,wimbledon,2101,E F,G H,,,,,,,,,,",
            "2014-usopen-1101,2014,usopen,1101,I J,K L,,,,,,,,,,",
            "2016-usopen-1205,2016,usopen,1205,M N,O P,,,,,,,,,,",
            "2018-ausopen-1101,2018,ausopen,1101,Q R,S T,,,,,,,,,,",
        ];
        let text = format!("{HEADER}\n{}\n", rows.join("\n"));
        let metas = parse_matches_file(text.as_bytes()).unwrap();
        assert_eq!(metas.len(), 5);
        assert_eq!(metas[1].gender, Gender::Women);
        assert_eq!(metas[2].year, 2014);
        assert_eq!(metas[4].tournament, Tournament::AusOpen);
    }

    #[test]
    fn falls_back_to_match_id() {
        let text = "match_id,player1,player2\n2017-usopen-1304,A,B\n";
        let metas = parse_matches_file(text.as_bytes()).unwrap();
        assert_eq!(metas[0].tournament, Tournament::UsOpen);
        assert_eq!(metas[0].year, 2017);
        assert_eq!(metas[0].gender, Gender::Men);
    }

    #[test]
    fn event_name_wins_over_number() {
        let text = "match_id,player1,player2,event_name\n2017-usopen-1304,A,B,Women's Singles\n";
        assert_eq!(parse_matches_file(text.as_bytes()).unwrap()[0].gender, Gender::Women);
    }

    #[test]
    fn unknown_slam_code() {
        let text = "match_id,player1,player2\n2017-davis-1304,A,B\n";
        assert!(matches!(
            parse_matches_file(text.as_bytes()),
            Err(IngestError::UnknownTournament(_))
        ));
    }

    #[test]
    fn malformed_row() {
        let text = "match_id,player1,player2\n2017-usopen-1304,A\n";
        assert!(matches!(
            parse_matches_file(text.as_bytes()),
            Err(IngestError::MalformedRow { line: 2, .. })
        ));
    }

    #[test]
    fn explicit_start_date() {
        let text = "match_id,player1,player2,start_date\n2020-usopen-1101,A,B,20200901\n";
        assert_eq!(
            parse_matches_file(text.as_bytes()).unwrap()[0].start_date,
            NaiveDate::from_ymd_opt(2020, 9, 1).unwrap()
        );
    }
}
