//! Type-tagged canonical strings for primitive leaf values.
//!
//! Values are stored as `<tag>:<text>` so that comparison is plain string
//! equality regardless of which language produced the snapshot.

pub fn int(v: i64) -> String {
    format!("int:{v}")
}

/// Shortest decimal that round-trips to the same `f64`.
pub fn float(v: f64) -> String {
    if v.is_nan() {
        "float:NaN".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "float:inf" } else { "float:-inf" }.to_string()
    } else {
        format!("float:{v:?}")
    }
}

pub fn boolean(v: bool) -> String {
    format!("bool:{v}")
}

/// Strings keep their UTF-8 text; escaping happens in the JSON layer.
pub fn string(v: &str) -> String {
    format!("str:{v}")
}

pub fn char(v: char) -> String {
    format!("char:{v}")
}

/// Splits a canonical value into `(tag, text)`.
pub fn split(value: &str) -> Option<(&str, &str)> {
    value.split_once(':')
}
