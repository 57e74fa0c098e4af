//! Prepared-row file.
//!
//! ```text
//! #pointwin-prepared<TAB>version=1<TAB>config_hash=.. seed=.. schema=pointwin-features/1
//! match_id<TAB>point_number<TAB>serve_number<TAB>label<TAB><numeric…><TAB><categorical…>
//! ...rows...
//! ```
//!
//! Numeric cells use the shortest round-trip decimal form; missing categorical
//! values are empty cells.

use std::io::{BufRead, BufReader, Read, Write};
use std::sync::Arc;

use super::encode::FeatureSchema;
use super::rows::{PreparedRow, PreparedSet, RowLayout};
use super::{FeatureError, Result};
use crate::ArtifactStamp;

const MAGIC: &str = "#pointwin-prepared";
const VERSION: &str = "version=1";
const KEYS: [&str; 4] = ["match_id", "point_number", "serve_number", "label"];

pub fn write_prepared<W: Write>(mut w: W, set: &PreparedSet, stamp: &ArtifactStamp) -> Result<()> {
    writeln!(w, "{MAGIC}\t{VERSION}\t{}", stamp.describe())?;
    let header: Vec<&str> = KEYS
        .iter()
        .copied()
        .chain(set.layout.numeric.iter().map(String::as_str))
        .chain(set.layout.categorical.iter().map(String::as_str))
        .collect();
    writeln!(w, "{}", header.join("\t"))?;
    let mut line = String::new();
    for r in &set.rows {
        line.clear();
        line.push_str(&format!("{}\t{}\t{}\t{}", r.match_id, r.point_number, r.serve_number, r.label));
        for v in &r.numeric {
            line.push('\t');
            line.push_str(&v.to_string());
        }
        for c in &r.categorical {
            line.push('\t');
            line.push_str(c.as_deref().unwrap_or(""));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn read_prepared<R: Read>(r: R) -> Result<(PreparedSet, ArtifactStamp)> {
    let bad = |msg: String| FeatureError::Format(msg);
    let mut lines = BufReader::new(r).lines();
    let first = lines.next().transpose()?.ok_or_else(|| bad("empty file".into()))?;
    let mut head = first.split('\t');
    if head.next() != Some(MAGIC) || head.next() != Some(VERSION) {
        return Err(bad("not a prepared-row file (version 1)".into()));
    }
    let stamp = head
        .next()
        .and_then(ArtifactStamp::parse)
        .ok_or_else(|| bad("missing artifact stamp".into()))?;
    let header = lines.next().transpose()?.ok_or_else(|| bad("missing column header".into()))?;
    let cols: Vec<&str> = header.split('\t').collect();
    if cols.len() < KEYS.len() || cols[..KEYS.len()] != KEYS {
        return Err(bad("column header must start with match_id, point_number, serve_number, label".into()));
    }
    let reference = super::canonical_layout();
    let n_num = cols[KEYS.len()..]
        .iter()
        .take_while(|c| !reference.categorical.iter().any(|k| k == *c))
        .count();
    let layout = RowLayout {
        numeric: cols[KEYS.len()..KEYS.len() + n_num].iter().map(|s| s.to_string()).collect(),
        categorical: cols[KEYS.len() + n_num..].iter().map(|s| s.to_string()).collect(),
    };

    let mut rows = Vec::new();
    let mut current: Option<Arc<str>> = None;
    for (i, line) in lines.enumerate() {
        let line = line?;
        let lineno = i + 3;
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != cols.len() {
            return Err(bad(format!("line {lineno}: expected {} fields, found {}", cols.len(), cells.len())));
        }
        let parse_err = |col: &str, v: &str| bad(format!("line {lineno}: bad {col} value {v:?}"));
        let id = match &current {
            Some(id) if **id == *cells[0] => Arc::clone(id),
            _ => {
                let id: Arc<str> = Arc::from(cells[0]);
                current = Some(Arc::clone(&id));
                id
            }
        };
        let numeric = cells[KEYS.len()..KEYS.len() + n_num]
            .iter()
            .zip(&layout.numeric)
            .map(|(v, c)| v.parse::<f64>().map_err(|_| parse_err(c, v)))
            .collect::<Result<Vec<_>>>()?;
        rows.push(PreparedRow {
            match_id: id,
            point_number: cells[1].parse().map_err(|_| parse_err("point_number", cells[1]))?,
            serve_number: cells[2]
                .parse()
                .ok()
                .filter(|s| matches!(s, 1 | 2))
                .ok_or_else(|| parse_err("serve_number", cells[2]))?,
            label: cells[3]
                .parse()
                .ok()
                .filter(|l| matches!(l, 0 | 1))
                .ok_or_else(|| parse_err("label", cells[3]))?,
            numeric,
            categorical: cells[KEYS.len() + n_num..]
                .iter()
                .map(|c| (!c.is_empty()).then(|| c.to_string()))
                .collect(),
        });
    }
    Ok((PreparedSet { layout, rows }, stamp))
}

/// Writes the human-readable schema listing.
pub fn write_schema_sidecar<W: Write>(mut w: W, schema: &FeatureSchema, stamp: &ArtifactStamp) -> Result<()> {
    writeln!(w, "# {}", stamp.describe())?;
    w.write_all(schema.sidecar_text().as_bytes())?;
    Ok(())
}
