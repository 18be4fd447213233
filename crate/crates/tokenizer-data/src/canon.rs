//! Canonical JSON: UTF-8, keys sorted, two-space indentation, one trailing
//! LF. Every artifact this project writes goes through here, so byte-identity
//! of reruns reduces to determinism of the values themselves.
//!
//! Sorting falls out of `serde_json::Value`: its map is a BTreeMap (the
//! `preserve_order` feature is off), so a round-trip through `Value` orders
//! every object's keys.

use serde::Serialize;

/// Serializes any value to canonical JSON.
///
/// Non-finite floats serialize as `null` (serde_json semantics); types whose
/// fields can be NaN must validate finiteness before writing, which every
/// report type in this workspace does at construction.
pub fn to_canonical_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let v = serde_json::to_value(value)?;
    Ok(format!("{}\n", serde_json::to_string_pretty(&v)?))
}
