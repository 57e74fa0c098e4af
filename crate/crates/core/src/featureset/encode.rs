use std::borrow::Borrow;
use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::rows::{PreparedRow, RowLayout};
use crate::artifact::sha256_hex;
use crate::ingest::{ServeDepth, ServeWidth};
use crate::models::Matrix;
use crate::SCHEMA_VERSION;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericParams {
    pub column: String,
    pub mean: f64,
    pub sd: f64,
}

/// Categorical column expanded into one indicator per category.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneHotGroup {
    pub source: String,
    pub categories: Vec<String>,
    /// False for the fixed dictionaries, true when read off the fit rows.
    pub fitted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColumnKind {
    Numeric,
    OneHot { group: String, category: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
}

/// Everything needed to turn prepared rows into model input: numeric columns
/// first (standardized), then one-hot groups in layout order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub version: String,
    pub layout: RowLayout,
    pub numeric: Vec<NumericParams>,
    pub groups: Vec<OneHotGroup>,
}

fn fixed_dictionary(column: &str) -> Option<Vec<String>> {
    match column {
        "ServeWidth" => Some(ServeWidth::ALL.iter().map(|w| w.code().to_string()).collect()),
        "ServeDepth" => Some(ServeDepth::ALL.iter().map(|d| d.code().to_string()).collect()),
        _ => None,
    }
}

impl FeatureSchema {
    /// Fits standardization parameters (population sd, 1 when degenerate) and
    /// open category dictionaries on `rows`.
    pub fn fit<R: Borrow<PreparedRow>>(layout: &RowLayout, rows: &[R]) -> Self {
        let rows: Vec<&PreparedRow> = rows.iter().map(Borrow::borrow).collect();
        let n = rows.len() as f64;
        let numeric = layout
            .numeric
            .iter()
            .enumerate()
            .map(|(j, name)| {
                let (mean, sd) = if rows.is_empty() {
                    (0.0, 1.0)
                } else {
                    let mean = rows.iter().map(|r| r.numeric[j]).sum::<f64>() / n;
                    let var = rows.iter().map(|r| (r.numeric[j] - mean).powi(2)).sum::<f64>() / n;
                    let sd = var.sqrt();
                    (mean, if sd > 0.0 && sd.is_finite() { sd } else { 1.0 })
                };
                NumericParams {
                    column: name.clone(),
                    mean,
                    sd,
                }
            })
            .collect();
        let groups = layout
            .categorical
            .iter()
            .enumerate()
            .map(|(j, name)| match fixed_dictionary(name) {
                Some(categories) => OneHotGroup {
                    source: name.clone(),
                    categories,
                    fitted: false,
                },
                None => {
                    let seen: BTreeSet<&str> = rows.iter().filter_map(|r| r.categorical[j].as_deref()).collect();
                    OneHotGroup {
                        source: name.clone(),
                        categories: seen.into_iter().map(String::from).collect(),
                        fitted: true,
                    }
                }
            })
            .collect();
        Self {
            version: SCHEMA_VERSION.to_string(),
            layout: layout.clone(),
            numeric,
            groups,
        }
    }

    pub fn width(&self) -> usize {
        self.numeric.len() + self.groups.iter().map(|g| g.categories.len()).sum::<usize>()
    }

    pub fn columns(&self) -> Vec<ColumnSpec> {
        let mut cols: Vec<ColumnSpec> = self
            .numeric
            .iter()
            .map(|p| ColumnSpec {
                name: p.column.clone(),
                kind: ColumnKind::Numeric,
            })
            .collect();
        for g in &self.groups {
            for c in &g.categories {
                cols.push(ColumnSpec {
                    name: format!("{}={}", g.source, c),
                    kind: ColumnKind::OneHot {
                        group: g.source.clone(),
                        category: c.clone(),
                    },
                });
            }
        }
        cols
    }

    pub fn column_names(&self) -> Vec<String> {
        self.columns().into_iter().map(|c| c.name).collect()
    }

    /// SHA-256 of the canonical JSON form. Two schemas with equal fingerprints
    /// encode rows identically.
    pub fn fingerprint(&self) -> String {
        sha256_hex(&serde_json::to_vec(self).expect("schema serializes"))
    }

    /// Encodes one row into `out` (length [`width`](Self::width)). Missing or
    /// unseen categories leave their group all zero; unseen values are
    /// returned so callers can report them.
    pub fn encode_row<'r>(&self, row: &'r PreparedRow, out: &mut [f64]) -> Vec<(&str, &'r str)> {
        let mut unseen = Vec::new();
        for (j, p) in self.numeric.iter().enumerate() {
            out[j] = (row.numeric[j] - p.mean) / p.sd;
        }
        let mut offset = self.numeric.len();
        for (g, value) in self.groups.iter().zip(&row.categorical) {
            let slot = &mut out[offset..offset + g.categories.len()];
            slot.fill(0.0);
            if let Some(v) = value.as_deref() {
                match g.categories.iter().position(|c| c == v) {
                    Some(k) => slot[k] = 1.0,
                    None => unseen.push((g.source.as_str(), v)),
                }
            }
            offset += g.categories.len();
        }
        unseen
    }

    /// Encodes `rows` without touching any parameter.
    pub fn transform<R: Borrow<PreparedRow>>(&self, rows: &[R]) -> FeatureMatrix {
        let rows: Vec<&PreparedRow> = rows.iter().map(Borrow::borrow).collect();
        let width = self.width();
        let mut data = vec![0.0; rows.len() * width];
        let mut warned: BTreeSet<(String, String)> = BTreeSet::new();
        for (row, out) in rows.iter().zip(data.chunks_mut(width.max(1))) {
            for (col, value) in self.encode_row(row, &mut out[..width]) {
                if warned.insert((col.to_string(), value.to_string())) {
                    log::warn!("unseen {col} category {value:?}; encoded as all zeros");
                }
            }
        }
        FeatureMatrix {
            x: Matrix::new(rows.len(), width, data),
            y: rows.iter().map(|r| r.label).collect(),
            match_ids: rows.iter().map(|r| Arc::clone(&r.match_id)).collect(),
            columns: self.column_names(),
        }
    }

    /// Human-readable listing of every column with its kind and parameters.
    pub fn sidecar_text(&self) -> String {
        let mut s = format!("# feature schema {}\n# fingerprint {}\n", self.version, self.fingerprint());
        s.push_str("index\tname\tkind\tmean\tsd\n");
        for (i, p) in self.numeric.iter().enumerate() {
            s.push_str(&format!("{i}\t{}\tnumeric\t{}\t{}\n", p.column, p.mean, p.sd));
        }
        let mut i = self.numeric.len();
        for g in &self.groups {
            let kind = if g.fitted { "onehot-fitted" } else { "onehot" };
            for c in &g.categories {
                s.push_str(&format!("{i}\t{}={c}\t{kind}\t\t\n", g.source));
                i += 1;
            }
        }
        s
    }
}

/// Encoded rows of one serve-number subset.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    pub x: Matrix,
    pub y: Vec<u8>,
    pub match_ids: Vec<Arc<str>>,
    pub columns: Vec<String>,
}

impl FeatureMatrix {
    pub fn labels_f64(&self) -> Vec<f64> {
        self.y.iter().map(|&v| f64::from(v)).collect()
    }
}

/// Fits a schema on `fit_rows` and encodes `rows` with it.
pub fn encode(rows: &[PreparedRow], layout: &RowLayout, fit_rows: &[PreparedRow]) -> (FeatureMatrix, FeatureSchema) {
    let schema = FeatureSchema::fit(layout, fit_rows);
    (schema.transform(rows), schema)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout() -> RowLayout {
        RowLayout {
            numeric: vec!["A".into(), "B".into()],
            categorical: vec!["ServeWidth".into(), "Surface".into()],
        }
    }

    fn row(a: f64, width: Option<&str>, surface: &str) -> PreparedRow {
        PreparedRow {
            match_id: Arc::from("m"),
            point_number: 1,
            serve_number: 1,
            label: 1,
            numeric: vec![a, 7.0],
            categorical: vec![width.map(String::from), Some(surface.to_string())],
        }
    }

    #[test]
    fn one_hot_serve_width() {
        let rows = [row(1.0, Some("W"), "grass")];
        let (fm, schema) = encode(&rows, &layout(), &rows);
        assert_eq!(schema.width(), 2 + 5 + 1);
        assert_eq!(&fm.x.row(0)[2..7], &[0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(fm.columns[6], "ServeWidth=W");
    }

    #[test]
    fn constant_column_becomes_zero() {
        let rows = [row(1.0, None, "grass"), row(3.0, None, "grass")];
        let (fm, schema) = encode(&rows, &layout(), &rows);
        assert_eq!(schema.numeric[1].sd, 1.0);
        assert_eq!(fm.x.column(1).collect::<Vec<_>>(), vec![0.0, 0.0]);
        assert_eq!(fm.x.column(0).collect::<Vec<_>>(), vec![-1.0, 1.0]);
    }

    #[test]
    fn unseen_category_is_all_zero() {
        let fit = [row(1.0, Some("W"), "grass")];
        let schema = FeatureSchema::fit(&layout(), &fit);
        let before = schema.clone();
        let fm = schema.transform(&[row(2.0, Some("B"), "clay")]);
        assert_eq!(fm.x.row(0)[7], 0.0);
        assert_eq!(fm.x.row(0)[2], 1.0);
        assert_eq!(schema, before);
    }

    #[test]
    fn fingerprint_tracks_parameters() {
        let a = FeatureSchema::fit(&layout(), &[row(1.0, None, "grass")]);
        let b = FeatureSchema::fit(&layout(), &[row(2.0, None, "grass")]);
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint(), a.clone().fingerprint());
    }
}
