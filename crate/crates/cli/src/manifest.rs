//! Run manifests and artifact envelopes.

use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

/// Keys whose values change between identical runs; left out of digests.
const VOLATILE_KEYS: &[&str] = &["nodes_expanded", "wall_time_ms"];

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub tool_version: &'static str,
    pub seed: u64,
    pub wall_time_ms: u128,
    pub output_digest: String,
}

/// Collects what a manifest needs while a command runs.
pub struct Recorder {
    command: String,
    parameters: Value,
    seed: u64,
    start: Instant,
}

impl Recorder {
    pub fn new(command: &str, parameters: Value, seed: u64) -> Self {
        Recorder { command: command.to_string(), parameters, seed, start: Instant::now() }
    }

    pub fn finish(&self, output_digest: String) -> RunManifest {
        RunManifest {
            command: self.command.clone(),
            parameters: self.parameters.clone(),
            tool_version: env!("CARGO_PKG_VERSION"),
            seed: self.seed,
            wall_time_ms: self.start.elapsed().as_millis(),
            output_digest,
        }
    }

    /// `{schema_version, manifest, result}` as pretty JSON.
    pub fn json_artifact<T: Serialize>(&self, result: &T) -> anyhow::Result<String> {
        let value = serde_json::to_value(result)?;
        let manifest = self.finish(digest_json(&value));
        let out = json!({ "schema_version": SCHEMA_VERSION, "manifest": manifest, "result": value });
        Ok(serde_json::to_string_pretty(&out)? + "\n")
    }

    /// `body` preceded by a `# manifest: {...}` comment line.
    pub fn text_artifact(&self, body: &str) -> anyhow::Result<String> {
        Ok(format!("{}{body}", self.comment(body)?))
    }

    /// The manifest comment line for a text artifact with this body.
    pub fn comment(&self, body: &str) -> anyhow::Result<String> {
        let manifest = self.finish(digest_text(body));
        Ok(format!("# manifest: {}\n", serde_json::to_string(&manifest)?))
    }
}

fn strip_volatile(value: &mut Value) {
    match value {
        Value::Object(map) => {
            map.retain(|k, _| !VOLATILE_KEYS.contains(&k.as_str()));
            map.values_mut().for_each(strip_volatile);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_volatile),
        _ => {}
    }
}

/// sha256 of the compact JSON with volatile keys removed. Object keys are
/// sorted, so the digest does not depend on field order.
pub fn digest_json(value: &Value) -> String {
    let mut v = value.clone();
    strip_volatile(&mut v);
    digest_text(&v.to_string())
}

pub fn digest_text(body: &str) -> String {
    hex::encode(Sha256::digest(body.as_bytes()))
}
