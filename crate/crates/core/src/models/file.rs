use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FittedModel, Hyperparams, ModelError, Result};
use crate::featureset::{FeatureMatrix, FeatureSchema, PreparedRow, RowLayout};
use crate::models::Family;
use crate::ArtifactStamp;

pub const MODEL_FORMAT: &str = "pointwin-model/1";

/// A fitted model with everything needed to apply it: the feature schema it
/// was trained on, its hyperparameters and the matches it saw.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub family: Family,
    pub hyperparams: Hyperparams,
    pub serve_number: Option<u8>,
    pub stamp: ArtifactStamp,
    pub schema_fingerprint: String,
    pub schema: FeatureSchema,
    /// Sorted ids of every match whose rows reached the fit.
    pub training_match_ids: Vec<String>,
    pub model: FittedModel,
}

impl ModelFile {
    pub fn new(
        model: FittedModel,
        hyperparams: Hyperparams,
        schema: FeatureSchema,
        mut training_match_ids: Vec<String>,
        serve_number: Option<u8>,
        stamp: ArtifactStamp,
    ) -> Self {
        training_match_ids.sort();
        training_match_ids.dedup();
        Self {
            format: MODEL_FORMAT.to_string(),
            family: model.family(),
            hyperparams,
            serve_number,
            stamp,
            schema_fingerprint: schema.fingerprint(),
            schema,
            training_match_ids,
            model,
        }
    }

    pub fn saw_match(&self, match_id: &str) -> bool {
        self.training_match_ids
            .binary_search_by(|m| m.as_str().cmp(match_id))
            .is_ok()
    }

    /// Encodes `rows` with the recorded schema and predicts them.
    pub fn predict_rows(&self, layout: &RowLayout, rows: &[PreparedRow]) -> Result<(FeatureMatrix, Vec<f64>)> {
        if *layout != self.schema.layout {
            return Err(ModelError::SchemaMismatch {
                expected: format!("{} row columns", self.schema.layout.numeric.len() + self.schema.layout.categorical.len()),
                found: format!("{} row columns", layout.numeric.len() + layout.categorical.len()),
            });
        }
        let fm = self.schema.transform(rows);
        let p = self.predict_matrix(&fm)?;
        Ok((fm, p))
    }

    /// Predicts an already encoded matrix; its columns must match the schema.
    pub fn predict_matrix(&self, fm: &FeatureMatrix) -> Result<Vec<f64>> {
        let expected = self.schema.column_names();
        if fm.columns != expected {
            return Err(ModelError::SchemaMismatch {
                expected: format!("{} columns ({})", expected.len(), self.schema_fingerprint),
                found: format!("{} columns", fm.columns.len()),
            });
        }
        self.model.predict_proba(&fm.x)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<ModelFile>(text)?.validated()
    }

    fn validated(self) -> Result<Self> {
        let file = self;
        if file.format != MODEL_FORMAT {
            return Err(ModelError::Format(format!("unsupported model format `{}`", file.format)));
        }
        if file.schema.fingerprint() != file.schema_fingerprint {
            return Err(ModelError::Format("schema fingerprint does not match embedded schema".into()));
        }
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer(&mut w, self)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        serde_json::from_reader::<_, ModelFile>(BufReader::new(File::open(path)?))?.validated()
    }
}
