use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Verification {
    Verified,
    Mismatch,
    Skipped,
}

/// One run of a command. Everything except `wall_time_ms` is a function of
/// the command, its parameters and the seed.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub wall_time_ms: f64,
    pub counters: BTreeMap<String, u64>,
    pub verification: Verification,
    /// SHA-256 of the primary output.
    pub checksum: String,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            schema: SCHEMA,
            command: command.to_string(),
            parameters: BTreeMap::new(),
            seed: None,
            wall_time_ms: 0.0,
            counters: BTreeMap::new(),
            verification: Verification::Skipped,
            checksum: String::new(),
        }
    }

    pub fn param(&mut self, key: &str, v: impl Serialize) -> &mut Self {
        self.parameters
            .insert(key.to_string(), serde_json::to_value(v).expect("serializable parameter"));
        self
    }

    pub fn count(&mut self, key: &str, v: u64) -> &mut Self {
        *self.counters.entry(key.to_string()).or_default() += v;
        self
    }

    pub fn text_summary(&self) -> String {
        let mut s = format!(
            "{}: verification {:?}, {:.1} ms, checksum {}",
            self.command,
            self.verification,
            self.wall_time_ms,
            &self.checksum[..16.min(self.checksum.len())]
        );
        for (k, v) in &self.counters {
            s.push_str(&format!(", {k} {v}"));
        }
        s
    }
}

pub fn checksum(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
