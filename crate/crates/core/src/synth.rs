//! Simulated Grand Slam matches in the public point-by-point layout.
//!
//! Matches are played point by point under real scoring rules (advantage
//! games, seven-point tiebreaks, per-event final-set rules, best of five for
//! men). Server win probability depends on the serve number, the serve
//! placement and the rank gap, so the simulated data carries a weak, learnable
//! signal with roughly the class balance seen on real first and second serves.
//!
//! The generator writes the same post-point scoreboard columns as the public
//! files, which makes it a stand-in for the real data in examples and tests.

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::{
    assemble_dataset, EventFlag, Gender, IngestError, MatchMeta, Measurement, MergedDataset, PlayerEvents,
    RankingTable, RawPoint, ReturnDepth, Scope, ServeDepth, ServeWidth, Tournament, TABLE1_COLUMNS,
};

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub matches: usize,
    pub seed: u64,
    pub tournaments: Vec<Tournament>,
    pub years: Vec<i32>,
    /// Size of the player pool; the last tenth never appears in the rankings.
    pub players: usize,
    /// Share of matches simulated as women's (best of three) matches.
    pub women_share: f64,
    /// Share of men's matches in which one served point loses its placement.
    pub missing_placement_share: f64,
    /// Logistic weight of the log-rank gap on the server's win probability.
    pub rank_effect: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            matches: 20,
            seed: 0,
            tournaments: vec![Tournament::Wimbledon, Tournament::UsOpen],
            years: vec![2016, 2017, 2018, 2019],
            players: 128,
            women_share: 0.0,
            missing_placement_share: 0.0,
            rank_effect: 0.12,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimPlayer {
    pub id: u32,
    pub first_name: String,
    pub last_name: String,
    /// 1 is best.
    pub strength_rank: u32,
    pub ranked: bool,
}

impl SimPlayer {
    pub fn name(&self) -> String {
        format!("{} {}", self.first_name, self.last_name)
    }
}

/// Parsed-form output of the simulator plus everything needed to write the
/// equivalent public files.
#[derive(Clone, Debug)]
pub struct SimulatedData {
    pub points: Vec<RawPoint>,
    pub matches: Vec<MatchMeta>,
    pub rankings: RankingTable,
    pub players: Vec<SimPlayer>,
    snapshots: Vec<(NaiveDate, u32, u32)>,
}

impl SimulatedData {
    /// Assembles with the default men's Wimbledon/US Open 2016–2020 scope.
    pub fn assemble(&self) -> Result<MergedDataset, IngestError> {
        assemble_dataset(self.points.clone(), &self.matches, &self.rankings, &Scope::default())
    }

    /// Writes `<year>-<slam>-points.csv`, `<year>-<slam>-matches.csv`,
    /// `atp_rankings_sim.csv` and `atp_players.csv` into `dir`.
    pub fn write_public_files(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let events: BTreeSet<(i32, Tournament)> = self.matches.iter().map(|m| (m.year, m.tournament)).collect();
        for (year, t) in events {
            let ids: BTreeSet<&str> = self
                .matches
                .iter()
                .filter(|m| m.year == year && m.tournament == t)
                .map(|m| m.match_id.as_str())
                .collect();

            let path = dir.join(format!("{year}-{}-matches.csv", t.code()));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["match_id", "year", "slam", "match_num", "player1", "player2", "event_name"])?;
            for m in self.matches.iter().filter(|m| ids.contains(m.match_id.as_str())) {
                let num = m.match_id.rsplit('-').next().unwrap_or("");
                let event = match m.gender {
                    Gender::Women => "Women's Singles",
                    _ => "Men's Singles",
                };
                w.write_record([
                    m.match_id.as_str(),
                    &year.to_string(),
                    t.code(),
                    num,
                    &m.player1_name,
                    &m.player2_name,
                    event,
                ])?;
            }
            w.flush()?;
            written.push(path);

            let path = dir.join(format!("{year}-{}-points.csv", t.code()));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(TABLE1_COLUMNS)?;
            for p in self.points.iter().filter(|p| ids.contains(p.match_id.as_str())) {
                w.write_record(p.table1_cells())?;
            }
            w.flush()?;
            written.push(path);
        }

        let path = dir.join("atp_rankings_sim.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["ranking_date", "rank", "player", "points"])?;
        for (date, rank, id) in &self.snapshots {
            w.write_record([
                date.format("%Y%m%d").to_string(),
                rank.to_string(),
                id.to_string(),
                (12000 / rank).to_string(),
            ])?;
        }
        w.flush()?;
        written.push(path);

        let path = dir.join("atp_players.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["player_id", "name_first", "name_last", "hand", "dob", "ioc"])?;
        for p in &self.players {
            w.write_record([p.id.to_string().as_str(), &p.first_name, &p.last_name, "R", "19900101", "SIM"])?;
        }
        w.flush()?;
        written.push(path);
        Ok(written)
    }
}

const FIRST: [&str; 16] = [
    "Adam", "Bruno", "Carlos", "Dario", "Emil", "Felix", "Goran", "Hugo", "Ivan", "Jonas", "Karel", "Luca",
    "Marat", "Nils", "Oscar", "Pablo",
];
const LAST: [&str; 16] = [
    "Almer", "Berdin", "Castell", "Dovic", "Estrand", "Fornet", "Galvan", "Haller", "Isner", "Janko", "Kessel",
    "Lorenz", "Moreau", "Novak", "Orlov", "Pereira",
];

pub fn simulate_dataset(cfg: &SimConfig) -> SimulatedData {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let players: Vec<SimPlayer> = (0..cfg.players.max(2))
        .map(|i| SimPlayer {
            id: 100_001 + i as u32,
            first_name: FIRST[i % FIRST.len()].to_string(),
            last_name: format!("{}{}", LAST[(i / FIRST.len()) % LAST.len()], suffix(i / (FIRST.len() * LAST.len()))),
            strength_rank: i as u32 + 1,
            ranked: i < cfg.players.max(2) * 9 / 10,
        })
        .collect();

    let mut rankings = RankingTable::default();
    let mut snapshots = Vec::new();
    let years: BTreeSet<i32> = cfg.years.iter().copied().collect();
    for &year in &years {
        for month in [1, 6] {
            let date = NaiveDate::from_ymd_opt(year, month, 1).unwrap();
            for p in players.iter().filter(|p| p.ranked) {
                let jitter: i64 = rng.gen_range(-2..=2);
                let rank = (i64::from(p.strength_rank) + jitter).max(1) as u32;
                rankings.insert(p.id, date, rank);
                snapshots.push((date, rank, p.id));
            }
        }
    }
    for p in &players {
        rankings.add_player(p.id, &p.name());
    }

    let mut points = Vec::new();
    let mut matches = Vec::new();
    let mut counters = std::collections::BTreeMap::new();
    for _ in 0..cfg.matches {
        let tournament = cfg.tournaments[rng.gen_range(0..cfg.tournaments.len())];
        let year = cfg.years[rng.gen_range(0..cfg.years.len())];
        let women = rng.gen_bool(cfg.women_share.clamp(0.0, 1.0));
        let counter = counters.entry((year, tournament, women)).or_insert(0u32);
        *counter += 1;
        let num = if women { 2100 } else { 1100 } + *counter;
        let match_id = format!("{year}-{}-{num}", tournament.code());
        let a = rng.gen_range(0..players.len());
        let mut b = rng.gen_range(0..players.len() - 1);
        if b >= a {
            b += 1;
        }
        let meta = MatchMeta {
            match_id: match_id.clone(),
            tournament,
            year,
            surface: tournament.surface(),
            player1_name: players[a].name(),
            player2_name: players[b].name(),
            gender: if women { Gender::Women } else { Gender::Men },
            start_date: tournament.start_date(year),
        };
        let edge = cfg.rank_effect
            * ((players[b].strength_rank as f64).ln() - (players[a].strength_rank as f64).ln());
        let mut sim = MatchSim::new(&match_id, tournament, year, if women { 3 } else { 5 }, edge);
        let mut match_points = sim.play(&mut rng);
        if !women && rng.gen_bool(cfg.missing_placement_share.clamp(0.0, 1.0)) {
            let served: Vec<usize> = (0..match_points.len())
                .filter(|&i| match_points[i].serve_width.is_some())
                .collect();
            if !served.is_empty() {
                match_points[served[rng.gen_range(0..served.len())]].serve_width = None;
            }
        }
        points.extend(match_points);
        matches.push(meta);
    }
    SimulatedData {
        points,
        matches,
        rankings,
        players,
        snapshots,
    }
}

fn suffix(n: usize) -> String {
    if n == 0 {
        String::new()
    } else {
        format!("-{}", n + 1)
    }
}

fn score_token(points: u32) -> &'static str {
    match points {
        0 => "0",
        1 => "15",
        2 => "30",
        _ => "40",
    }
}

struct MatchSim<'a> {
    match_id: &'a str,
    tournament: Tournament,
    year: i32,
    best_of: u32,
    /// Log-odds advantage of player 1 when serving (negated for player 2).
    edge: f64,
    sets: [u32; 2],
    games: [u32; 2],
    game_points: [u32; 2],
    match_points: [u32; 2],
    set_no: u32,
    game_no: u32,
    point_number: u32,
    game_server: usize,
    tiebreak_first_server: usize,
    tiebreak_points_played: u32,
    elapsed: u32,
    set_no_for_row: u32,
    game_no_for_row: u32,
    row_games: [u32; 2],
    row_score: [String; 2],
}

impl<'a> MatchSim<'a> {
    fn new(match_id: &'a str, tournament: Tournament, year: i32, best_of: u32, edge: f64) -> Self {
        Self {
            match_id,
            tournament,
            year,
            best_of,
            edge,
            sets: [0; 2],
            games: [0; 2],
            game_points: [0; 2],
            match_points: [0; 2],
            set_no: 1,
            game_no: 1,
            point_number: 0,
            game_server: 0,
            tiebreak_first_server: 0,
            tiebreak_points_played: 0,
            elapsed: 0,
            set_no_for_row: 1,
            game_no_for_row: 1,
            row_games: [0; 2],
            row_score: [String::new(), String::new()],
        }
    }

    fn in_tiebreak(&self) -> bool {
        match self.tournament.tiebreak_at(self.year, if self.best_of == 3 && self.set_no == 3 { 5 } else { self.set_no }) {
            Some(n) => self.games == [n, n],
            None => false,
        }
    }

    fn point_server(&self) -> usize {
        if self.in_tiebreak() {
            let k = self.tiebreak_points_played;
            if k == 0 || ((k + 1) / 2) % 2 == 0 {
                self.tiebreak_first_server
            } else {
                1 - self.tiebreak_first_server
            }
        } else {
            self.game_server
        }
    }

    fn returner_has_break_point(&self, server: usize) -> bool {
        if self.in_tiebreak() {
            return false;
        }
        let r = self.game_points[1 - server];
        let s = self.game_points[server];
        r >= 3 && r > s
    }

    fn play(&mut self, rng: &mut ChaCha8Rng) -> Vec<RawPoint> {
        let mut out = Vec::new();
        if rng.gen_bool(0.5) {
            // Leading placeholder row as found at the start of some public files.
            let mut p = RawPoint::blank(self.match_id);
            p.point_label = "0X".to_string();
            p.point_number = 0;
            p.point_winner = 0;
            p.point_server = 0;
            p.serve_number = None;
            p.elapsed_time = "0:00:00".to_string();
            out.push(p);
        }
        let sets_to_win = self.best_of / 2 + 1;
        while self.sets[0] < sets_to_win && self.sets[1] < sets_to_win {
            out.push(self.play_point(rng));
        }
        out
    }

    fn play_point(&mut self, rng: &mut ChaCha8Rng) -> RawPoint {
        let server = self.point_server();
        let returner = 1 - server;
        let break_point = self.returner_has_break_point(server);
        let edge = if server == 0 { self.edge } else { -self.edge };
        self.point_number += 1;
        self.elapsed += rng.gen_range(20..60);

        let first_in = rng.gen_bool(0.62);
        let double_fault = !first_in && rng.gen_bool(0.09);
        let serve_number = if first_in { 1 } else { 2 };
        let (width, depth) = if double_fault {
            (None, None)
        } else {
            let weights: [f64; 5] = if first_in {
                [0.07, 0.10, 0.24, 0.15, 0.44]
            } else {
                [0.20, 0.26, 0.13, 0.26, 0.15]
            };
            let w = ServeWidth::ALL[WeightedIndex::new(weights).unwrap().sample(rng)];
            let ctl = rng.gen_bool(if first_in { 0.45 } else { 0.30 });
            (Some(w), Some(if ctl { ServeDepth::Ctl } else { ServeDepth::Nctl }))
        };
        let base: f64 = if first_in { 0.732 } else { 0.572 };
        let placement_bonus = match (width, depth) {
            (Some(ServeWidth::W), Some(ServeDepth::Ctl)) => 0.25,
            (Some(ServeWidth::W | ServeWidth::C), _) => 0.10,
            (Some(ServeWidth::B | ServeWidth::BC), _) => -0.10,
            _ => 0.0,
        };
        let logit = (base / (1.0 - base)).ln() + edge + placement_bonus;
        let server_wins = !double_fault && rng.gen_bool(1.0 / (1.0 + (-logit).exp()));
        let winner = if server_wins { server } else { returner };

        let mut events = [PlayerEvents([Some(false); EventFlag::COUNT]); 2];
        let ace = server_wins && rng.gen_bool(if first_in { 0.22 } else { 0.04 });
        let mut rally = 0u32;
        if double_fault {
            events[server].set(EventFlag::DoubleFault, true);
        } else if ace {
            events[server].set(EventFlag::Ace, true);
            rally = 1;
        } else {
            rally = 2 + rng.gen_range(0..9);
            if rng.gen_bool(0.35) {
                events[winner].set(EventFlag::Winner, true);
            } else if rng.gen_bool(0.45) {
                events[1 - winner].set(EventFlag::UnforcedError, true);
            }
            for (p, ev) in events.iter_mut().enumerate() {
                if rng.gen_bool(0.12) {
                    ev.set(EventFlag::NetPoint, true);
                    ev.set(EventFlag::NetPointWon, p == winner);
                }
            }
        }
        if break_point {
            events[returner].set(EventFlag::BreakPoint, true);
            if winner == returner {
                events[returner].set(EventFlag::BreakPointWon, true);
            } else {
                events[returner].set(EventFlag::BreakPointMissed, true);
            }
        }
        let return_depth = (!double_fault && !ace).then(|| if rng.gen_bool(0.4) { ReturnDepth::D } else { ReturnDepth::Nd });

        let (game_winner, set_winner) = self.award(winner);
        let (speed_kmh, speed_mph) = if rng.gen_bool(0.03) {
            (Measurement::from_value(0.0), Measurement::from_value(0.0))
        } else {
            let kmh: f64 = if first_in { rng.gen_range(170..225) } else { rng.gen_range(135..180) } as f64;
            (Measurement::from_value(kmh), Measurement::from_value((kmh / 1.609).round()))
        };

        let mut p = RawPoint::blank(self.match_id);
        p.elapsed_time = format!("{}:{:02}:{:02}", self.elapsed / 3600, (self.elapsed / 60) % 60, self.elapsed % 60);
        p.set_no = self.set_no_for_row;
        p.game_no = self.game_no_for_row;
        p.point_number = self.point_number;
        p.point_label = self.point_number.to_string();
        p.p1_games_won = self.row_games[0];
        p.p2_games_won = self.row_games[1];
        p.set_winner = set_winner.map_or(0, |w| w as u8 + 1);
        p.game_winner = game_winner.map_or(0, |w| w as u8 + 1);
        p.point_winner = winner as u8 + 1;
        p.point_server = server as u8 + 1;
        p.speed_kmh = speed_kmh;
        p.speed_mph = speed_mph;
        p.p1_score = self.row_score[0].clone();
        p.p2_score = self.row_score[1].clone();
        p.p1_points_won = self.match_points[0];
        p.p2_points_won = self.match_points[1];
        p.events = events;
        p.serve_indicator = Some(server as u8 + 1);
        p.serve_number = Some(serve_number);
        p.winner_type = Some(if ace { "A" } else { "0" }.to_string());
        p.winner_shot_type = Some("0".to_string());
        p.p1_distance_run = Measurement::from_value(f64::from(rally) * rng.gen_range(2.0..6.0f64).round());
        p.p2_distance_run = Measurement::from_value(f64::from(rally) * rng.gen_range(2.0..6.0f64).round());
        p.rally_count = Measurement::from_value(f64::from(rally));
        p.serve_width = width;
        p.serve_depth = depth;
        p.return_depth = return_depth;
        p
    }
}

impl MatchSim<'_> {
    /// Applies the point to the scoreboard and records the post-point columns
    /// in `row_*`. Returns the game and set winners, if any.
    fn award(&mut self, winner: usize) -> (Option<usize>, Option<usize>) {
        self.set_no_for_row = self.set_no;
        self.game_no_for_row = self.game_no;
        self.match_points[winner] += 1;
        let tiebreak = self.in_tiebreak();
        self.game_points[winner] += 1;
        let (w, l) = (self.game_points[winner], self.game_points[1 - winner]);
        let target = if tiebreak { 7 } else { 4 };
        if tiebreak {
            self.tiebreak_points_played += 1;
        }
        if !(w >= target && w >= l + 2) {
            self.row_games = self.games;
            self.row_score = if tiebreak {
                [self.game_points[0].to_string(), self.game_points[1].to_string()]
            } else {
                let (a, b) = (self.game_points[0], self.game_points[1]);
                if a >= 3 && b >= 3 {
                    match a.cmp(&b) {
                        std::cmp::Ordering::Equal => ["40".to_string(), "40".to_string()],
                        std::cmp::Ordering::Greater => ["AD".to_string(), "40".to_string()],
                        std::cmp::Ordering::Less => ["40".to_string(), "AD".to_string()],
                    }
                } else {
                    [score_token(a).to_string(), score_token(b).to_string()]
                }
            };
            return (None, None);
        }

        // Game over.
        self.game_points = [0, 0];
        self.games[winner] += 1;
        self.row_games = self.games;
        self.row_score = ["0".to_string(), "0".to_string()];
        if tiebreak {
            self.game_server = 1 - self.tiebreak_first_server;
            self.tiebreak_points_played = 0;
        } else {
            self.game_server = 1 - self.game_server;
        }
        let (gw, gl) = (self.games[winner], self.games[1 - winner]);
        let set_over = (gw >= 6 && gw >= gl + 2) || tiebreak;
        if set_over {
            self.sets[winner] += 1;
            self.games = [0, 0];
            self.set_no += 1;
            self.game_no = 1;
            return (Some(winner), Some(winner));
        }
        self.game_no += 1;
        if self.in_tiebreak() {
            self.tiebreak_first_server = self.game_server;
        }
        (Some(winner), None)
    }
}
