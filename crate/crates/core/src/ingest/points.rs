use std::collections::HashMap;
use std::fmt;
use std::io::Read;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{IngestError, Result};

/// Point-file columns in published order. Re-serializing a [`RawPoint`]
/// produces cells in this order.
pub const TABLE1_COLUMNS: [&str; 45] = [
    "match_id",
    "ElapsedTime",
    "SetNo",
    "P1GamesWon",
    "P2GamesWon",
    "SetWinner",
    "GameNo",
    "GameWinner",
    "PointNumber",
    "PointWinner",
    "PointServer",
    "Speed_KMH",
    "P1Score",
    "P2Score",
    "P1PointsWon",
    "P2PointsWon",
    "P1Ace",
    "P2Ace",
    "P1Winner",
    "P2Winner",
    "P1DoubleFault",
    "P2DoubleFault",
    "P1UnfErr",
    "P2UnfErr",
    "P1NetPoint",
    "P2NetPoint",
    "P1NetPointWon",
    "P2NetPointWon",
    "P1BreakPoint",
    "P2BreakPoint",
    "P1BreakPointWon",
    "P2BreakPointWon",
    "Speed_MPH",
    "P1BreakPointMissed",
    "P2BreakPointMissed",
    "ServeIndicator",
    "ServeNumber",
    "WinnerType",
    "WinnerShotType",
    "P1DistanceRun",
    "P2DistanceRun",
    "RallyCount",
    "ServeWidth",
    "ServeDepth",
    "ReturnDepth",
];

const OPTIONAL_COLUMNS: [&str; 10] = [
    "ElapsedTime",
    "Speed_KMH",
    "Speed_MPH",
    "ServeIndicator",
    "WinnerType",
    "WinnerShotType",
    "P1DistanceRun",
    "P2DistanceRun",
    "RallyCount",
    "ReturnDepth",
];

mod col {
    pub const MATCH_ID: usize = 0;
    pub const ELAPSED: usize = 1;
    pub const SET_NO: usize = 2;
    pub const P1_GAMES: usize = 3;
    pub const P2_GAMES: usize = 4;
    pub const SET_WINNER: usize = 5;
    pub const GAME_NO: usize = 6;
    pub const GAME_WINNER: usize = 7;
    pub const POINT_NUMBER: usize = 8;
    pub const POINT_WINNER: usize = 9;
    pub const POINT_SERVER: usize = 10;
    pub const SPEED_KMH: usize = 11;
    pub const P1_SCORE: usize = 12;
    pub const P2_SCORE: usize = 13;
    pub const P1_POINTS: usize = 14;
    pub const P2_POINTS: usize = 15;
    pub const SPEED_MPH: usize = 32;
    pub const SERVE_INDICATOR: usize = 35;
    pub const SERVE_NUMBER: usize = 36;
    pub const WINNER_TYPE: usize = 37;
    pub const WINNER_SHOT_TYPE: usize = 38;
    pub const P1_DISTANCE: usize = 39;
    pub const P2_DISTANCE: usize = 40;
    pub const RALLY_COUNT: usize = 41;
    pub const SERVE_WIDTH: usize = 42;
    pub const SERVE_DEPTH: usize = 43;
    pub const RETURN_DEPTH: usize = 44;
}

/// Delimited-text settings for the point files.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dialect {
    pub delimiter: u8,
}

impl Default for Dialect {
    fn default() -> Self {
        Self { delimiter: b',' }
    }
}

/// Per-player event indicators recorded on every point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventFlag {
    Ace,
    Winner,
    DoubleFault,
    UnforcedError,
    NetPoint,
    NetPointWon,
    BreakPoint,
    BreakPointWon,
    BreakPointMissed,
}

impl EventFlag {
    pub const COUNT: usize = 9;
    pub const ALL: [EventFlag; 9] = [
        EventFlag::Ace,
        EventFlag::Winner,
        EventFlag::DoubleFault,
        EventFlag::UnforcedError,
        EventFlag::NetPoint,
        EventFlag::NetPointWon,
        EventFlag::BreakPoint,
        EventFlag::BreakPointWon,
        EventFlag::BreakPointMissed,
    ];

    /// Column suffix after the `P1` / `P2` prefix.
    pub fn suffix(self) -> &'static str {
        match self {
            EventFlag::Ace => "Ace",
            EventFlag::Winner => "Winner",
            EventFlag::DoubleFault => "DoubleFault",
            EventFlag::UnforcedError => "UnfErr",
            EventFlag::NetPoint => "NetPoint",
            EventFlag::NetPointWon => "NetPointWon",
            EventFlag::BreakPoint => "BreakPoint",
            EventFlag::BreakPointWon => "BreakPointWon",
            EventFlag::BreakPointMissed => "BreakPointMissed",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn column(self, player: u8) -> String {
        format!("P{player}{}", self.suffix())
    }
}

/// One player's event indicators, indexed by [`EventFlag`]. `None` marks an
/// empty cell.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PlayerEvents(pub [Option<bool>; EventFlag::COUNT]);

impl PlayerEvents {
    pub fn get(&self, flag: EventFlag) -> Option<bool> {
        self.0[flag.index()]
    }

    /// Treats an empty cell as "did not happen".
    pub fn is_set(&self, flag: EventFlag) -> bool {
        self.get(flag).unwrap_or(false)
    }

    pub fn set(&mut self, flag: EventFlag, value: bool) {
        self.0[flag.index()] = Some(value);
    }
}

/// A numeric cell kept verbatim so that re-serialization is exact.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measurement(String);

impl Measurement {
    pub fn missing() -> Self {
        Self(String::new())
    }

    pub fn from_value(v: f64) -> Self {
        Self(format!("{v}"))
    }

    fn parse(raw: &str) -> Option<Self> {
        let t = raw.trim();
        if t.is_empty() || t.eq_ignore_ascii_case("na") || t.eq_ignore_ascii_case("nan") {
            return Some(Self(raw.to_string()));
        }
        t.parse::<f64>().ok().filter(|v| v.is_finite()).map(|_| Self(raw.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn value(&self) -> Option<f64> {
        self.0.trim().parse::<f64>().ok().filter(|v| v.is_finite())
    }
}

macro_rules! code_enum {
    ($(#[$m:meta])* $name:ident { $($variant:ident => $code:literal),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn code(self) -> &'static str {
                match self { $($name::$variant => $code),+ }
            }
        }

        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s.trim() {
                    $($code => Ok($name::$variant),)+
                    other => Err(format!("unknown {} code {other:?}", stringify!($name))),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.code())
            }
        }
    };
}

code_enum!(
    /// Lateral placement of the serve.
    ServeWidth { B => "B", BC => "BC", BW => "BW", C => "C", W => "W" }
);
code_enum!(
    /// Depth of the serve: close to the service line or not.
    ServeDepth { Ctl => "CTL", Nctl => "NCTL" }
);
code_enum!(
    /// Depth of the return: deep or not deep.
    ReturnDepth { D => "D", Nd => "ND" }
);

/// Columns of the source file that are not part of the known point schema,
/// preserved as text.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Spillover {
    names: Arc<[String]>,
    values: Vec<String>,
}

impl Spillover {
    pub fn get(&self, name: &str) -> Option<&str> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.values[i].as_str())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// One row of a point-by-point file.
///
/// Post-point state columns (`*Score`, `*GamesWon`, `*PointsWon`) describe
/// the scoreboard after the point, as published.
#[derive(Clone, Debug, PartialEq)]
pub struct RawPoint {
    pub match_id: String,
    pub elapsed_time: String,
    pub set_no: u32,
    pub game_no: u32,
    /// `PointNumber` cell as published.
    pub point_label: String,
    /// Leading integer of `point_label`.
    pub point_number: u32,
    pub p1_games_won: u32,
    pub p2_games_won: u32,
    pub set_winner: u8,
    pub game_winner: u8,
    pub point_winner: u8,
    pub point_server: u8,
    pub speed_kmh: Measurement,
    pub speed_mph: Measurement,
    pub p1_score: String,
    pub p2_score: String,
    pub p1_points_won: u32,
    pub p2_points_won: u32,
    /// Event flags for player 1 and player 2.
    pub events: [PlayerEvents; 2],
    pub serve_indicator: Option<u8>,
    pub serve_number: Option<u8>,
    pub winner_type: Option<String>,
    pub winner_shot_type: Option<String>,
    pub p1_distance_run: Measurement,
    pub p2_distance_run: Measurement,
    pub rally_count: Measurement,
    pub serve_width: Option<ServeWidth>,
    pub serve_depth: Option<ServeDepth>,
    pub return_depth: Option<ReturnDepth>,
    pub extra: Spillover,
}

impl RawPoint {
    /// A point with every optional cell empty; convenient for fixtures.
    pub fn blank(match_id: &str) -> Self {
        Self {
            match_id: match_id.to_string(),
            elapsed_time: String::new(),
            set_no: 1,
            game_no: 1,
            point_label: "1".to_string(),
            point_number: 1,
            p1_games_won: 0,
            p2_games_won: 0,
            set_winner: 0,
            game_winner: 0,
            point_winner: 1,
            point_server: 1,
            speed_kmh: Measurement::missing(),
            speed_mph: Measurement::missing(),
            p1_score: "0".to_string(),
            p2_score: "0".to_string(),
            p1_points_won: 0,
            p2_points_won: 0,
            events: [PlayerEvents([Some(false); EventFlag::COUNT]); 2],
            serve_indicator: None,
            serve_number: Some(1),
            winner_type: None,
            winner_shot_type: None,
            p1_distance_run: Measurement::missing(),
            p2_distance_run: Measurement::missing(),
            rally_count: Measurement::missing(),
            serve_width: None,
            serve_depth: None,
            return_depth: None,
            extra: Spillover::default(),
        }
    }

    /// Serve speed in km/h. A recorded 0 means the serve was not tracked.
    pub fn speed_kmh(&self) -> Option<f64> {
        self.speed_kmh.value().filter(|v| *v > 0.0)
    }

    pub fn speed_mph(&self) -> Option<f64> {
        self.speed_mph.value().filter(|v| *v > 0.0)
    }

    /// Events of player `1` or `2`.
    pub fn player(&self, player: u8) -> &PlayerEvents {
        &self.events[usize::from(player - 1)]
    }

    pub fn returner(&self) -> u8 {
        3 - self.point_server
    }

    /// True when the server faulted twice; there is no successful serve to
    /// place on such a point.
    pub fn is_double_fault(&self) -> bool {
        matches!(self.point_server, 1 | 2)
            && self.player(self.point_server).is_set(EventFlag::DoubleFault)
    }

    pub fn has_serve_placement(&self) -> bool {
        self.serve_width.is_some() && self.serve_depth.is_some()
    }

    /// Cells in [`TABLE1_COLUMNS`] order.
    pub fn table1_cells(&self) -> Vec<String> {
        let mut cells = vec![String::new(); TABLE1_COLUMNS.len()];
        cells[col::MATCH_ID] = self.match_id.clone();
        cells[col::ELAPSED] = self.elapsed_time.clone();
        cells[col::SET_NO] = self.set_no.to_string();
        cells[col::P1_GAMES] = self.p1_games_won.to_string();
        cells[col::P2_GAMES] = self.p2_games_won.to_string();
        cells[col::SET_WINNER] = self.set_winner.to_string();
        cells[col::GAME_NO] = self.game_no.to_string();
        cells[col::GAME_WINNER] = self.game_winner.to_string();
        cells[col::POINT_NUMBER] = self.point_label.clone();
        cells[col::POINT_WINNER] = self.point_winner.to_string();
        cells[col::POINT_SERVER] = self.point_server.to_string();
        cells[col::SPEED_KMH] = self.speed_kmh.as_str().to_string();
        cells[col::P1_SCORE] = self.p1_score.clone();
        cells[col::P2_SCORE] = self.p2_score.clone();
        cells[col::P1_POINTS] = self.p1_points_won.to_string();
        cells[col::P2_POINTS] = self.p2_points_won.to_string();
        for (p, events) in self.events.iter().enumerate() {
            for flag in EventFlag::ALL {
                cells[flag_column_index(flag, p)] = match events.get(flag) {
                    None => String::new(),
                    Some(true) => "1".to_string(),
                    Some(false) => "0".to_string(),
                };
            }
        }
        cells[col::SPEED_MPH] = self.speed_mph.as_str().to_string();
        cells[col::SERVE_INDICATOR] = opt_to_string(self.serve_indicator);
        cells[col::SERVE_NUMBER] = opt_to_string(self.serve_number);
        cells[col::WINNER_TYPE] = self.winner_type.clone().unwrap_or_default();
        cells[col::WINNER_SHOT_TYPE] = self.winner_shot_type.clone().unwrap_or_default();
        cells[col::P1_DISTANCE] = self.p1_distance_run.as_str().to_string();
        cells[col::P2_DISTANCE] = self.p2_distance_run.as_str().to_string();
        cells[col::RALLY_COUNT] = self.rally_count.as_str().to_string();
        cells[col::SERVE_WIDTH] = opt_to_string(self.serve_width);
        cells[col::SERVE_DEPTH] = opt_to_string(self.serve_depth);
        cells[col::RETURN_DEPTH] = opt_to_string(self.return_depth);
        cells
    }

    /// Inverse of [`RawPoint::table1_cells`]. `line` is only used in errors.
    pub fn from_table1_cells(cells: &[&str], line: u64) -> Result<Self> {
        assert_eq!(cells.len(), TABLE1_COLUMNS.len());
        let cell = CellReader { cells, line };
        let point_label = cells[col::POINT_NUMBER].to_string();
        let point_number = leading_integer(&point_label).ok_or_else(|| cell.invalid(col::POINT_NUMBER))?;
        let mut events = [PlayerEvents::default(); 2];
        for (p, slot) in events.iter_mut().enumerate() {
            for flag in EventFlag::ALL {
                slot.0[flag.index()] = cell.flag(flag_column_index(flag, p))?;
            }
        }
        Ok(Self {
            match_id: cells[col::MATCH_ID].to_string(),
            elapsed_time: cells[col::ELAPSED].to_string(),
            set_no: cell.u32(col::SET_NO)?,
            game_no: cell.u32(col::GAME_NO)?,
            point_label,
            point_number,
            p1_games_won: cell.u32(col::P1_GAMES)?,
            p2_games_won: cell.u32(col::P2_GAMES)?,
            set_winner: cell.slot(col::SET_WINNER)?,
            game_winner: cell.slot(col::GAME_WINNER)?,
            point_winner: cell.slot(col::POINT_WINNER)?,
            point_server: cell.slot(col::POINT_SERVER)?,
            speed_kmh: cell.measurement(col::SPEED_KMH)?,
            speed_mph: cell.measurement(col::SPEED_MPH)?,
            p1_score: cells[col::P1_SCORE].to_string(),
            p2_score: cells[col::P2_SCORE].to_string(),
            p1_points_won: cell.u32(col::P1_POINTS)?,
            p2_points_won: cell.u32(col::P2_POINTS)?,
            events,
            serve_indicator: cell.opt_slot(col::SERVE_INDICATOR)?,
            serve_number: cell.opt_slot(col::SERVE_NUMBER)?,
            winner_type: non_empty(cells[col::WINNER_TYPE]),
            winner_shot_type: non_empty(cells[col::WINNER_SHOT_TYPE]),
            p1_distance_run: cell.measurement(col::P1_DISTANCE)?,
            p2_distance_run: cell.measurement(col::P2_DISTANCE)?,
            rally_count: cell.measurement(col::RALLY_COUNT)?,
            serve_width: cell.code(col::SERVE_WIDTH)?,
            serve_depth: cell.code(col::SERVE_DEPTH)?,
            return_depth: cell.code(col::RETURN_DEPTH)?,
            extra: Spillover::default(),
        })
    }
}

fn flag_column_index(flag: EventFlag, player_idx: usize) -> usize {
    // Flags occupy 16..=31 in P1/P2 pairs, except the missed-break-point pair
    // which follows Speed_MPH.
    match flag {
        EventFlag::BreakPointMissed => 33 + player_idx,
        other => 16 + 2 * other.index() + player_idx,
    }
}

fn opt_to_string<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn non_empty(s: &str) -> Option<String> {
    (!s.is_empty()).then(|| s.to_string())
}

fn leading_integer(s: &str) -> Option<u32> {
    let digits: String = s.trim().chars().take_while(|c| c.is_ascii_digit()).collect();
    digits.parse().ok()
}

struct CellReader<'a> {
    cells: &'a [&'a str],
    line: u64,
}

impl CellReader<'_> {
    fn invalid(&self, idx: usize) -> IngestError {
        IngestError::InvalidValue {
            line: self.line,
            column: TABLE1_COLUMNS[idx].to_string(),
            value: self.cells[idx].to_string(),
        }
    }

    fn u32(&self, idx: usize) -> Result<u32> {
        self.cells[idx].trim().parse().map_err(|_| self.invalid(idx))
    }

    fn slot(&self, idx: usize) -> Result<u8> {
        self.opt_slot(idx)?.ok_or_else(|| self.invalid(idx))
    }

    fn opt_slot(&self, idx: usize) -> Result<Option<u8>> {
        let t = self.cells[idx].trim();
        if t.is_empty() {
            return Ok(None);
        }
        match t.parse::<u8>() {
            Ok(v) if v <= 2 => Ok(Some(v)),
            _ => Err(self.invalid(idx)),
        }
    }

    fn flag(&self, idx: usize) -> Result<Option<bool>> {
        match self.cells[idx].trim() {
            "" => Ok(None),
            "0" => Ok(Some(false)),
            "1" => Ok(Some(true)),
            _ => Err(self.invalid(idx)),
        }
    }

    fn measurement(&self, idx: usize) -> Result<Measurement> {
        Measurement::parse(self.cells[idx]).ok_or_else(|| self.invalid(idx))
    }

    fn code<T: FromStr>(&self, idx: usize) -> Result<Option<T>> {
        let t = self.cells[idx].trim();
        if t.is_empty() {
            return Ok(None);
        }
        t.parse().map(Some).map_err(|_| self.invalid(idx))
    }
}

/// Maps file columns onto [`TABLE1_COLUMNS`].
struct PointLayout {
    positions: Vec<Option<usize>>,
    extra_positions: Vec<usize>,
    extra_names: Arc<[String]>,
}

impl PointLayout {
    fn resolve(headers: &csv::StringRecord) -> Result<Self> {
        let by_name: HashMap<String, usize> = headers
            .iter()
            .enumerate()
            .map(|(i, h)| (h.trim().to_ascii_lowercase(), i))
            .collect();
        let mut positions = Vec::with_capacity(TABLE1_COLUMNS.len());
        for name in TABLE1_COLUMNS {
            let pos = by_name.get(&name.to_ascii_lowercase()).copied();
            if pos.is_none() && !OPTIONAL_COLUMNS.contains(&name) {
                return Err(IngestError::MissingColumn(name.to_string()));
            }
            positions.push(pos);
        }
        let known: Vec<usize> = positions.iter().flatten().copied().collect();
        let extra_positions: Vec<usize> = (0..headers.len()).filter(|i| !known.contains(i)).collect();
        let extra_names: Arc<[String]> = extra_positions
            .iter()
            .map(|&i| headers[i].to_string())
            .collect::<Vec<_>>()
            .into();
        Ok(Self {
            positions,
            extra_positions,
            extra_names,
        })
    }

    fn read(&self, record: &csv::StringRecord, line: u64) -> Result<RawPoint> {
        let cells: Vec<&str> = self
            .positions
            .iter()
            .map(|p| p.map_or("", |i| &record[i]))
            .collect();
        let mut point = RawPoint::from_table1_cells(&cells, line)?;
        if !self.extra_positions.is_empty() {
            point.extra = Spillover {
                names: Arc::clone(&self.extra_names),
                values: self.extra_positions.iter().map(|&i| record[i].to_string()).collect(),
            };
        }
        Ok(point)
    }
}

/// Parses a header-first point-by-point file.
///
/// Columns are matched to [`TABLE1_COLUMNS`] case-insensitively; unknown
/// columns end up in [`RawPoint::extra`]. Empty cells stay empty.
pub fn parse_points_file<R: Read>(source: R, dialect: &Dialect) -> Result<Vec<RawPoint>> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(dialect.delimiter)
        .has_headers(true)
        .flexible(true)
        .from_reader(source);
    let headers = reader.headers()?.clone();
    let layout = PointLayout::resolve(&headers)?;
    let mut record = csv::StringRecord::new();
    let mut points = Vec::new();
    while reader.read_record(&mut record)? {
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != headers.len() {
            return Err(IngestError::MalformedRow {
                line,
                expected: headers.len(),
                found: record.len(),
            });
        }
        points.push(layout.read(&record, line)?);
    }
    Ok(points)
}
