//! Content fingerprints for parameter sets, configs and reports.

use serde::Serialize;
use sha2::{Digest, Sha256};

/// First 8 bytes (hex) of SHA-256 over the canonical JSON encoding, i.e.
/// with object keys in sorted order.
pub fn fingerprint<S: Serialize>(value: &S) -> String {
    let canonical = serde_json::to_value(value).expect("value serializes to JSON");
    let digest = Sha256::digest(canonical.to_string().as_bytes());
    hex::encode(&digest[..8])
}
