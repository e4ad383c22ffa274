use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// SHA-256 of a document's canonical JSON form, so the hash ignores
/// formatting but not content.
pub fn fingerprint<T: Serialize>(doc: &T) -> String {
    let bytes = serde_json::to_vec(doc).expect("documents serialize");
    format!("sha256:{}", hex::encode(Sha256::digest(&bytes)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptSummary {
    pub total_bits: u64,
    pub rounds: u64,
    /// Communication bound the run must respect, when one applies.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bound: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSummary {
    pub index: u64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub regret: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Solution {
    None,
    Point {
        coords: Vec<f64>,
    },
    Cell {
        base: Vec<u32>,
        perm: Vec<u8>,
        vertices: Vec<u32>,
        colors: Vec<Option<u8>>,
    },
    Violation {
        vertex: u32,
        reason: String,
    },
    Profiles {
        count: u64,
        profiles: Vec<ProfileSummary>,
    },
}

/// The referee's judgement of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub ok: bool,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub format: u32,
    pub command: Vec<String>,
    pub fingerprint: String,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub transcript: Option<TranscriptSummary>,
    pub solution: Solution,
    pub verdict: OracleVerdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_ms: Option<f64>,
}
