use crate::ingest::{EventFlag, RawPoint, ReturnDepth, ServeDepth, ServeWidth};

use super::{FeatureError, Result};

/// Running per-player counts, one row per point, each row counting only the
/// points strictly before it.
#[derive(Clone, Debug, PartialEq)]
pub struct AccumulatedColumns {
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl AccumulatedColumns {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.names.iter().position(|n| n == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

/// What a single point contributes to the accumulated columns, in
/// [`accumulated_names`] order.
fn increments(p: &RawPoint, out: &mut [f64]) {
    out.fill(0.0);
    let mut j = 0;
    for flag in EventFlag::ALL {
        for player in 1..=2u8 {
            out[j] = f64::from(u8::from(p.player(player).is_set(flag)));
            j += 1;
        }
    }
    let server = p.point_server;
    for player in 1..=2u8 {
        for w in ServeWidth::ALL {
            out[j] = f64::from(u8::from(player == server && p.serve_width == Some(*w)));
            j += 1;
        }
        for d in ServeDepth::ALL {
            out[j] = f64::from(u8::from(player == server && p.serve_depth == Some(*d)));
            j += 1;
        }
        for d in ReturnDepth::ALL {
            out[j] = f64::from(u8::from(player != server && p.return_depth == Some(*d)));
            j += 1;
        }
    }
}

/// Accumulated column names: `P1AceA, P2AceA, ..., P1ServeWidthBA, ...`.
/// P1/P2 twins always exist.
pub(crate) fn accumulated_names() -> Vec<String> {
    let mut names = Vec::new();
    for flag in EventFlag::ALL {
        for player in 1..=2u8 {
            names.push(format!("{}A", flag.column(player)));
        }
    }
    for player in 1..=2u8 {
        for w in ServeWidth::ALL {
            names.push(format!("P{player}ServeWidth{}A", w.code()));
        }
        for d in ServeDepth::ALL {
            names.push(format!("P{player}ServeDepth{}A", d.code()));
        }
        for d in ReturnDepth::ALL {
            names.push(format!("P{player}ReturnDepth{}A", d.code()));
        }
    }
    names
}

/// Prefix sums over one match. Points must be ordered by
/// `(set_no, game_no, point_number)`.
pub fn accumulate(points: &[RawPoint]) -> Result<AccumulatedColumns> {
    check_order(points)?;
    let names = accumulated_names();
    let width = names.len();
    let mut running = vec![0.0; width];
    let mut step = vec![0.0; width];
    let mut rows = Vec::with_capacity(points.len());
    for p in points {
        rows.push(running.clone());
        increments(p, &mut step);
        for (acc, inc) in running.iter_mut().zip(&step) {
            *acc += inc;
        }
    }
    Ok(AccumulatedColumns { names, rows })
}

pub(crate) fn check_order(points: &[RawPoint]) -> Result<()> {
    for (i, w) in points.windows(2).enumerate() {
        let key = |p: &RawPoint| (p.set_no, p.game_no, p.point_number);
        if key(&w[1]) <= key(&w[0]) {
            return Err(FeatureError::UnorderedPoints {
                match_id: w[1].match_id.clone(),
                index: i + 1,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn points_with_aces(aces: &[bool]) -> Vec<RawPoint> {
        aces.iter()
            .enumerate()
            .map(|(i, &ace)| {
                let mut p = RawPoint::blank("m");
                p.point_number = i as u32 + 1;
                p.events[0].set(EventFlag::Ace, ace);
                p
            })
            .collect()
    }

    #[test]
    fn prefix_sum_of_aces() {
        let acc = accumulate(&points_with_aces(&[false, true, true, false])).unwrap();
        assert_eq!(acc.column("P1AceA").unwrap(), vec![0.0, 0.0, 1.0, 2.0]);
        assert_eq!(acc.column("P2AceA").unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn first_row_is_all_zero() {
        let acc = accumulate(&points_with_aces(&[true, true])).unwrap();
        assert!(acc.rows[0].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn empty_match() {
        assert!(accumulate(&[]).unwrap().rows.is_empty());
    }

    #[test]
    fn unordered_points_rejected() {
        let mut pts = points_with_aces(&[false, false, false]);
        pts.swap(1, 2);
        assert!(matches!(
            accumulate(&pts),
            Err(FeatureError::UnorderedPoints { index: 2, .. })
        ));
    }

    #[test]
    fn placement_counts_follow_the_server() {
        let mut a = RawPoint::blank("m");
        a.point_server = 2;
        a.serve_width = Some(ServeWidth::W);
        a.return_depth = Some(ReturnDepth::D);
        let mut b = RawPoint::blank("m");
        b.point_number = 2;
        let acc = accumulate(&[a, b]).unwrap();
        assert_eq!(acc.column("P2ServeWidthWA").unwrap(), vec![0.0, 1.0]);
        assert_eq!(acc.column("P1ServeWidthWA").unwrap(), vec![0.0, 0.0]);
        assert_eq!(acc.column("P1ReturnDepthDA").unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn names_are_paired() {
        let names = accumulated_names();
        assert_eq!(names.len(), 36);
        for n in names.iter().filter(|n| n.starts_with("P1")) {
            assert!(names.contains(&n.replacen("P1", "P2", 1)));
        }
    }
}
