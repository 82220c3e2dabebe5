//! Access-path ids.
//!
//! A node id is the access path from the root variable: the variable name
//! followed by `.field` and `[index]` segments, e.g. `var2.f4.f3` or
//! `items[2].name`.

use super::model::EdgeLabel;

pub fn child_path(parent: &str, label: &EdgeLabel) -> String {
    match label {
        EdgeLabel::Field(name) => format!("{parent}.{name}"),
        EdgeLabel::Index(i) => format!("{parent}[{i}]"),
    }
}

/// True when `path` lies strictly below `ancestor`.
pub fn is_descendant(path: &str, ancestor: &str) -> bool {
    path.len() > ancestor.len()
        && path.starts_with(ancestor)
        && matches!(path.as_bytes()[ancestor.len()], b'.' | b'[')
}

pub fn is_self_or_descendant(path: &str, ancestor: &str) -> bool {
    path == ancestor || is_descendant(path, ancestor)
}

/// Number of nodes on the path, the root counting as 1.
pub fn depth(path: &str) -> usize {
    1 + path.bytes().filter(|b| matches!(b, b'.' | b'[')).count()
}

/// Replaces the root segment of `path` with `new_root`.
pub fn rebase(path: &str, old_root: &str, new_root: &str) -> String {
    debug_assert!(is_self_or_descendant(path, old_root));
    format!("{new_root}{}", &path[old_root.len()..])
}

/// Root-relative form, with the root written as `$`.
pub fn relative(path: &str, root: &str) -> String {
    rebase(path, root, "$")
}

/// Field names and variable names may not contain path punctuation.
pub fn is_valid_segment(name: &str) -> bool {
    !name.is_empty() && !name.contains(['.', '[', ']'])
}

/// Splits a path into its root name and labels. Returns `None` on malformed input.
pub fn parse(path: &str) -> Option<(String, Vec<EdgeLabel>)> {
    let end = path.find(['.', '[']).unwrap_or(path.len());
    let root = &path[..end];
    if root.is_empty() {
        return None;
    }
    let mut labels = Vec::new();
    let mut rest = &path[end..];
    while !rest.is_empty() {
        if let Some(r) = rest.strip_prefix('.') {
            let end = r.find(['.', '[']).unwrap_or(r.len());
            if end == 0 {
                return None;
            }
            labels.push(EdgeLabel::Field(r[..end].to_string()));
            rest = &r[end..];
        } else {
            let r = rest.strip_prefix('[')?;
            let close = r.find(']')?;
            labels.push(EdgeLabel::Index(r[..close].parse().ok()?));
            rest = &r[close + 1..];
        }
    }
    Some((root.to_string(), labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_counts_root_as_one() {
        assert_eq!(depth("var1"), 1);
        assert_eq!(depth("var1.f3"), 2);
        assert_eq!(depth("var2.f4.f3"), 3);
        assert_eq!(depth("xs[0].name"), 3);
    }

    #[test]
    fn descendant_needs_a_separator() {
        assert!(is_descendant("a.b.c", "a.b"));
        assert!(is_descendant("a.b[0]", "a.b"));
        assert!(!is_descendant("a.bc", "a.b"));
        assert!(!is_descendant("a.b", "a.b"));
        assert!(is_self_or_descendant("a.b", "a.b"));
    }

    #[test]
    fn rebase_swaps_root() {
        assert_eq!(rebase("var1.f2", "var1", "var3"), "var3.f2");
        assert_eq!(relative("var1[2].x", "var1"), "$[2].x");
    }

    #[test]
    fn parse_roundtrips_child_path() {
        let (root, labels) = parse("v.a[3].b").unwrap();
        assert_eq!(root, "v");
        let mut p = root.clone();
        for l in &labels {
            p = child_path(&p, l);
        }
        assert_eq!(p, "v.a[3].b");
        assert!(parse("v..a").is_none());
        assert!(parse("v[x]").is_none());
    }
}
