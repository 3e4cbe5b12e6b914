//! Canonical JSON encoding and SHA-256 helpers.
//!
//! Every artifact that is digested or compared byte-for-byte (packs, graphs,
//! validation reports, page index trees) goes through [`to_canonical_bytes`]:
//! compact JSON with object keys in lexicographic order. Key ordering comes
//! from `serde_json::Map`, which is a `BTreeMap` as long as the
//! `preserve_order` feature stays disabled.

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// True for a 64-character lowercase hex string.
pub fn is_sha256_hex(s: &str) -> bool {
    s.len() == 64 && s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f'))
}

pub fn to_canonical_value<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("domain types serialize infallibly")
}

/// Compact JSON with sorted keys.
pub fn to_canonical_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let v = to_canonical_value(value);
    serde_json::to_vec(&v).expect("json value serializes infallibly")
}

pub fn to_canonical_string<T: Serialize>(value: &T) -> String {
    String::from_utf8(to_canonical_bytes(value)).expect("json is utf-8")
}
