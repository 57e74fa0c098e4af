use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Version tag of the canonical feature schema, embedded in every artifact.
pub const SCHEMA_VERSION: &str = "pointwin-features/1";

/// Provenance carried by every file the pipeline writes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactStamp {
    pub config_hash: String,
    pub seed: u64,
    pub schema_version: String,
}

impl ArtifactStamp {
    pub fn new(config_hash: impl Into<String>, seed: u64) -> Self {
        Self {
            config_hash: config_hash.into(),
            seed,
            schema_version: SCHEMA_VERSION.to_string(),
        }
    }

    /// Stamp for artifacts produced outside a configured run.
    pub fn unconfigured(seed: u64) -> Self {
        Self::new("none", seed)
    }

    /// `key=value` pairs separated by single spaces.
    pub fn describe(&self) -> String {
        format!(
            "config_hash={} seed={} schema={}",
            self.config_hash, self.seed, self.schema_version
        )
    }

    /// Parses the output of [`ArtifactStamp::describe`].
    pub fn parse(text: &str) -> Option<Self> {
        let mut hash = None;
        let mut seed = None;
        let mut schema = None;
        for part in text.split_whitespace() {
            let (k, v) = part.split_once('=')?;
            match k {
                "config_hash" => hash = Some(v.to_string()),
                "seed" => seed = v.parse().ok(),
                "schema" => schema = Some(v.to_string()),
                _ => {}
            }
        }
        Some(Self {
            config_hash: hash?,
            seed: seed?,
            schema_version: schema?,
        })
    }
}

/// Hex SHA-256 of `bytes`.
pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
