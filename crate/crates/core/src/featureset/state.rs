use crate::ingest::RawPoint;

use super::{FeatureError, Result};

/// Scoreboard as it stood when a point began.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PrePointState {
    /// In-game score per player: ordinal 0–4 for `0/15/30/40/AD`, or the
    /// point count inside a tiebreak.
    pub score: [f64; 2],
    pub games: [u32; 2],
    pub sets: [u32; 2],
    pub points_won: [u32; 2],
    pub tiebreak: bool,
}

impl PrePointState {
    /// True when the player receiving serve wins the game by winning this point.
    pub fn break_point_pending(&self, server: u8) -> bool {
        let s = usize::from(server == 2);
        break_point_pending(self.score[s], self.score[1 - s], self.tiebreak)
    }
}

/// Returner holds 40 against 0/15/30, or advantage. Never inside a tiebreak.
pub fn break_point_pending(server_score: f64, returner_score: f64, tiebreak: bool) -> bool {
    !tiebreak && (returner_score == 4.0 || (returner_score == 3.0 && server_score < 3.0))
}

/// Ordinal score encoding. Tiebreak cells hold point counts instead of tokens.
pub fn encode_score(token: &str, tiebreak: bool) -> Option<f64> {
    let token = token.trim();
    if tiebreak {
        return token.parse::<u32>().ok().map(f64::from);
    }
    match token {
        "0" | "" => Some(0.0),
        "15" => Some(1.0),
        "30" => Some(2.0),
        "40" => Some(3.0),
        "AD" | "A" => Some(4.0),
        _ => None,
    }
}

/// Moves the published post-point scoreboard down one row so row `i` holds
/// the state before point `i`. `tiebreak_at(set_no)` gives the game count
/// (per player) at which a set is decided by tiebreak.
///
/// Scores reset after a row with a game winner, games after a row with a set
/// winner; sets are counted from set winners. The post-match state of the last
/// row is dropped.
pub fn shift_outcomes(points: &[RawPoint], tiebreak_at: &dyn Fn(u32) -> Option<u32>) -> Result<Vec<PrePointState>> {
    let mut out = Vec::with_capacity(points.len());
    let mut sets = [0u32; 2];
    let mut prev: Option<&RawPoint> = None;
    for p in points {
        let mut state = PrePointState {
            sets,
            ..PrePointState::default()
        };
        if let Some(q) = prev {
            state.points_won = [q.p1_points_won, q.p2_points_won];
            if q.set_winner == 0 {
                state.games = [q.p1_games_won, q.p2_games_won];
            }
        }
        state.tiebreak = tiebreak_at(p.set_no).is_some_and(|n| state.games == [n, n]);
        if let Some(q) = prev.filter(|q| q.game_winner == 0) {
            for (slot, token) in state.score.iter_mut().zip([&q.p1_score, &q.p2_score]) {
                *slot = encode_score(token, state.tiebreak).ok_or_else(|| FeatureError::InvalidScore {
                    match_id: q.match_id.clone(),
                    token: token.clone(),
                })?;
            }
        }
        if p.set_winner == 1 || p.set_winner == 2 {
            sets[usize::from(p.set_winner - 1)] += 1;
        }
        out.push(state);
        prev = Some(p);
    }
    Ok(out)
}
