//! Canonical JSON: object keys sorted by code point, no insignificant
//! whitespace. Byte equality of two encodings implies value equality.

use std::hash::Hasher;

use fnv::FnvHasher;
use serde::Serialize;

/// Encodes `value` as canonical JSON.
///
/// Going through `serde_json::Value` sorts every object's keys, because the
/// crate's map type is a `BTreeMap` unless `preserve_order` is enabled.
pub fn to_vec<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let tree = serde_json::to_value(value).expect("serializable value");
    serde_json::to_vec(&tree).expect("in-memory JSON encoding")
}

pub fn to_string<T: Serialize + ?Sized>(value: &T) -> String {
    String::from_utf8(to_vec(value)).expect("JSON is UTF-8")
}

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hasher = FnvHasher::default();
    hasher.write(bytes);
    hasher.finish()
}

/// Short content digest, hex encoded.
pub fn digest_hex(bytes: &[u8]) -> String {
    format!("{:016x}", fnv1a64(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn fnv_matches_reference_vectors() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn keys_are_sorted_and_compact() {
        let mut m = HashMap::new();
        m.insert("zeta", 1);
        m.insert("alpha", 2);
        m.insert("Beta", 3);
        assert_eq!(to_string(&m), r#"{"Beta":3,"alpha":2,"zeta":1}"#);
    }
}
