//! Canonical JSON form and content digests.

use serde::{de::DeserializeOwned, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::Instance;

/// Pretty JSON with fields in declaration order; identical values give identical bytes.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::domain(format!("serialisation failed: {e}")))
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })
}

pub fn serialize_instance(instance: &Instance) -> Result<String> {
    to_canonical_json(instance)
}

pub fn deserialize_instance(text: &str) -> Result<Instance> {
    from_json(text)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn digest<T: Serialize>(value: &T) -> Result<String> {
    Ok(sha256_hex(to_canonical_json(value)?.as_bytes()))
}

/// Digest of the scheduling content only: identifiers and provenance do not count.
pub fn content_digest(instance: &Instance) -> Result<String> {
    digest(&(
        instance.horizon_s,
        instance.platform,
        &instance.satellites,
        &instance.tasks,
        &instance.visible_windows,
        &instance.opportunities,
        instance.fixed_transition_s,
    ))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    from_json(&std::fs::read_to_string(path)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut text = to_canonical_json(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
