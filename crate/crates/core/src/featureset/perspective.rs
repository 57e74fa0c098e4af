use super::rows::{PointRow, PreparedRow, RowLayout};
use super::{FeatureError, Result};

/// Index pairs of `P1…`/`P2…` twin columns.
#[derive(Clone, Debug, PartialEq)]
pub struct PairMap {
    pairs: Vec<(usize, usize)>,
}

impl PairMap {
    /// Every column starting with `P1` must have a `P2` twin and vice versa.
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let find = |target: &str| names.iter().position(|n| n.as_ref() == target);
        let mut pairs = Vec::new();
        for (i, name) in names.iter().enumerate() {
            let name = name.as_ref();
            if let Some(rest) = name.strip_prefix("P1") {
                let j = find(&format!("P2{rest}")).ok_or_else(|| FeatureError::UnpairedColumn(name.to_string()))?;
                pairs.push((i, j));
            } else if let Some(rest) = name.strip_prefix("P2") {
                find(&format!("P1{rest}")).ok_or_else(|| FeatureError::UnpairedColumn(name.to_string()))?;
            }
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn swap(&self, values: &mut [f64]) {
        for &(a, b) in &self.pairs {
            values.swap(a, b);
        }
    }
}

/// Rewrites rows so player 1 is the server. Rows served by player 2 have all
/// paired columns exchanged; the label is 1 iff the server won.
pub fn to_server_perspective(rows: Vec<PointRow>, layout: &RowLayout) -> Result<Vec<PreparedRow>> {
    let pairs = PairMap::new(&layout.numeric)?;
    Ok(rows
        .into_iter()
        .map(|mut r| {
            if r.point_server == 2 {
                pairs.swap(&mut r.numeric);
            }
            PreparedRow {
                label: u8::from(r.point_winner == r.point_server),
                match_id: r.match_id,
                point_number: r.point_number,
                serve_number: r.serve_number,
                numeric: r.numeric,
                categorical: r.categorical,
            }
        })
        .collect())
}
