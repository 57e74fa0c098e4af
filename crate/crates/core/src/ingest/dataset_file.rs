//! Tab-separated, self-contained dataset file.
//!
//! ```text
//! #pointwin-dataset<TAB>version=1<TAB>config_hash=.. seed=.. schema=..
//! #section<TAB>matches
//! match_id:str<TAB>tournament:str<TAB>...        (typed header)
//! ...rows...
//! #section<TAB>points
//! match_id:str<TAB>ElapsedTime:str<TAB>...       (point columns, published order)
//! ...rows...
//! ```
//!
//! Column headers carry a `:type` suffix (`str`, `int`, `flag`, `num`,
//! `cat`, `date`, `bool`). Point cells are written verbatim, so a dataset file
//! round-trips every point exactly.

use std::io::{Read, Write};

use super::assemble::{Exclusion, MergedDataset, MergedMatch};
use super::matches::{parse_date, Gender, MatchMeta};
use super::points::{RawPoint, TABLE1_COLUMNS};
use super::rankings::RankAtMatch;
use super::{IngestError, Result};
use crate::ArtifactStamp;

pub const DATASET_MAGIC: &str = "#pointwin-dataset";
const VERSION: &str = "version=1";

const MATCH_HEADER: [&str; 12] = [
    "match_id:str",
    "tournament:str",
    "year:int",
    "surface:str",
    "player1:str",
    "player2:str",
    "gender:str",
    "start_date:date",
    "p1_rank:int",
    "p1_ranked:bool",
    "p2_rank:int",
    "p2_ranked:bool",
];

fn point_column_type(name: &str) -> &'static str {
    match name {
        "match_id" | "ElapsedTime" | "PointNumber" | "P1Score" | "P2Score" | "WinnerType" | "WinnerShotType" => "str",
        "Speed_KMH" | "Speed_MPH" | "P1DistanceRun" | "P2DistanceRun" | "RallyCount" => "num",
        "ServeWidth" | "ServeDepth" | "ReturnDepth" => "cat",
        "SetNo" | "GameNo" | "P1GamesWon" | "P2GamesWon" | "SetWinner" | "GameWinner" | "PointWinner"
        | "PointServer" | "P1PointsWon" | "P2PointsWon" | "ServeIndicator" | "ServeNumber" => "int",
        _ => "flag",
    }
}

fn point_header() -> Vec<String> {
    TABLE1_COLUMNS
        .iter()
        .map(|c| format!("{c}:{}", point_column_type(c)))
        .collect()
}

fn tsv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .delimiter(b'\t')
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(w)
}

pub fn write_dataset<W: Write>(mut w: W, dataset: &MergedDataset, stamp: &ArtifactStamp) -> Result<()> {
    writeln!(w, "{DATASET_MAGIC}\t{VERSION}\t{}", stamp.describe())?;
    writeln!(w, "#section\tmatches")?;
    {
        let mut tsv = tsv_writer(&mut w);
        tsv.write_record(MATCH_HEADER)?;
        for m in &dataset.matches {
            let meta = &m.meta;
            tsv.write_record([
                meta.match_id.as_str(),
                meta.tournament.code(),
                &meta.year.to_string(),
                meta.surface.name(),
                &meta.player1_name,
                &meta.player2_name,
                meta.gender.code(),
                &meta.start_date.format("%Y-%m-%d").to_string(),
                &m.p1_rank.rank.to_string(),
                bool_cell(m.p1_rank.ranked),
                &m.p2_rank.rank.to_string(),
                bool_cell(m.p2_rank.ranked),
            ])?;
        }
        tsv.flush()?;
    }
    writeln!(w, "#section\tpoints")?;
    let mut tsv = tsv_writer(&mut w);
    tsv.write_record(point_header())?;
    for p in dataset.points() {
        tsv.write_record(p.table1_cells())?;
    }
    tsv.flush()?;
    Ok(())
}

fn bool_cell(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// Reads a file produced by [`write_dataset`]. Exclusions are not part of the
/// dataset file and come back empty.
pub fn read_dataset<R: Read>(mut r: R) -> Result<(MergedDataset, ArtifactStamp)> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let bad = |msg: &str| IngestError::DatasetFormat(msg.to_string());

    let (first, rest) = text.split_once('\n').ok_or_else(|| bad("empty file"))?;
    let mut head = first.split('\t');
    if head.next() != Some(DATASET_MAGIC) || head.next() != Some(VERSION) {
        return Err(bad("not a pointwin dataset file (version 1)"));
    }
    let stamp = head
        .next()
        .and_then(ArtifactStamp::parse)
        .ok_or_else(|| bad("missing artifact stamp"))?;

    let rest = rest
        .strip_prefix("#section\tmatches\n")
        .ok_or_else(|| bad("expected matches section"))?;
    let split_at = rest
        .find("\n#section\tpoints\n")
        .ok_or_else(|| bad("expected points section"))?;
    let (match_text, point_text) = (&rest[..=split_at], &rest[split_at + "\n#section\tpoints\n".len()..]);

    let mut matches = Vec::new();
    let mut reader = tsv_reader(match_text.as_bytes());
    expect_header(&mut reader, &MATCH_HEADER.map(String::from))?;
    for rec in reader.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != MATCH_HEADER.len() {
            return Err(IngestError::MalformedRow {
                line,
                expected: MATCH_HEADER.len(),
                found: rec.len(),
            });
        }
        let field_err = |i: usize| IngestError::InvalidValue {
            line,
            column: MATCH_HEADER[i].to_string(),
            value: rec[i].to_string(),
        };
        let tournament = rec[1].parse()?;
        let meta = MatchMeta {
            match_id: rec[0].to_string(),
            tournament,
            year: rec[2].parse().map_err(|_| field_err(2))?,
            surface: rec[3].parse().map_err(|_| field_err(3))?,
            player1_name: rec[4].to_string(),
            player2_name: rec[5].to_string(),
            gender: Gender::from_code(&rec[6]).ok_or_else(|| field_err(6))?,
            start_date: parse_date(&rec[7]).ok_or_else(|| field_err(7))?,
        };
        let rank = |i: usize| -> Result<RankAtMatch> {
            Ok(RankAtMatch {
                rank: rec[i].parse().map_err(|_| field_err(i))?,
                ranked: match &rec[i + 1] {
                    "1" => true,
                    "0" => false,
                    _ => return Err(field_err(i + 1)),
                },
            })
        };
        matches.push(MergedMatch {
            p1_rank: rank(8)?,
            p2_rank: rank(10)?,
            meta,
            points: Vec::new(),
        });
    }

    let mut reader = tsv_reader(point_text.as_bytes());
    expect_header(&mut reader, &point_header())?;
    let mut cursor = 0usize;
    for rec in reader.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != TABLE1_COLUMNS.len() {
            return Err(IngestError::MalformedRow {
                line,
                expected: TABLE1_COLUMNS.len(),
                found: rec.len(),
            });
        }
        let cells: Vec<&str> = rec.iter().collect();
        let point = RawPoint::from_table1_cells(&cells, line)?;
        while cursor < matches.len() && matches[cursor].meta.match_id != point.match_id {
            cursor += 1;
        }
        let slot = matches
            .get_mut(cursor)
            .ok_or_else(|| IngestError::OrphanPoints(point.match_id.clone()))?;
        slot.points.push(point);
    }
    Ok((
        MergedDataset {
            matches,
            exclusions: Vec::new(),
        },
        stamp,
    ))
}

fn tsv_reader(bytes: &[u8]) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .has_headers(true)
        .flexible(true)
        .from_reader(bytes)
}

fn expect_header(reader: &mut csv::Reader<&[u8]>, expected: &[String]) -> Result<()> {
    let headers = reader.headers()?;
    if headers.iter().ne(expected.iter().map(String::as_str)) {
        return Err(IngestError::DatasetFormat(format!(
            "unexpected column header: {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    }
    Ok(())
}

/// `exclusions.log`: one `match_id<TAB>reason` line per dropped match.
pub fn write_exclusions<W: Write>(mut w: W, exclusions: &[Exclusion]) -> Result<()> {
    for e in exclusions {
        writeln!(w, "{}\t{}", e.match_id, e.reason)?;
    }
    Ok(())
}
