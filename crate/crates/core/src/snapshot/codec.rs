use thiserror::Error;

use super::model::TestRunSnapshot;
use super::validate::graph_violations;
use crate::canonical_json;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("invalid JSON at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("invalid snapshot field `{field}`: {message}")]
    Validation { field: String, message: String },
}

/// Canonical snapshot bytes: sorted keys, no insignificant whitespace.
pub fn serialize(snapshot: &TestRunSnapshot) -> Vec<u8> {
    canonical_json::to_vec(snapshot)
}

/// Parses and checks a snapshot. Every graph invariant is enforced, so a
/// successful parse yields a canonical snapshot.
pub fn parse(bytes: &[u8]) -> Result<TestRunSnapshot, ParseError> {
    let snapshot: TestRunSnapshot = serde_json::from_slice(bytes).map_err(|e| {
        let offset = byte_offset(bytes, e.line(), e.column());
        if e.is_data() {
            ParseError::Validation {
                field: field_of(&e.to_string()),
                message: e.to_string(),
            }
        } else {
            ParseError::Syntax {
                offset,
                message: e.to_string(),
            }
        }
    })?;
    for (i, graph) in snapshot.variables.iter().enumerate() {
        if let Some(v) = graph_violations(graph).into_iter().next() {
            return Err(ParseError::Validation {
                field: format!("variables[{i}].{}", v.location),
                message: v.message,
            });
        }
    }
    Ok(snapshot)
}

/// serde_json reports 1-based lines and columns.
pub(crate) fn byte_offset(bytes: &[u8], line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start: usize = bytes
        .split(|&b| b == b'\n')
        .take(line - 1)
        .map(|l| l.len() + 1)
        .sum();
    (line_start + column.saturating_sub(1)).min(bytes.len())
}

fn field_of(message: &str) -> String {
    // serde messages name fields in backticks: "missing field `test_id`".
    message
        .split('`')
        .nth(1)
        .map(str::to_string)
        .unwrap_or_else(|| "<document>".to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snapshot::{
        canonicalize, EdgeLabel, GraphNode, ProgramVersion, RootVariable, VariableGraph,
    };

    fn sample() -> TestRunSnapshot {
        let raw = VariableGraph::raw(RootVariable::local("xs"), "c")
            .with_node(GraphNode::collection("c", "java.util.ArrayList"))
            .with_node(GraphNode::primitive("a", "java.lang.String", "str:héllo \"q\""))
            .with_node(GraphNode::null("b", "java.lang.Object"))
            .with_edge("c", EdgeLabel::Index(0), "a")
            .with_edge("c", EdgeLabel::Index(1), "b");
        TestRunSnapshot {
            program_version: ProgramVersion::Mutant("m7".into()),
            run_index: 0,
            test_id: "FooTest#bar".into(),
            outcome: None,
            variables: vec![canonicalize(&raw).unwrap()],
        }
    }

    #[test]
    fn round_trip_and_canonical_bytes() {
        let s = sample();
        let bytes = serialize(&s);
        assert_eq!(parse(&bytes).unwrap(), s);
        assert_eq!(serialize(&parse(&bytes).unwrap()), bytes);
        assert!(!bytes.contains(&b'\n'));
        assert!(!std::str::from_utf8(&bytes).unwrap().contains("\": "));
    }

    #[test]
    fn syntax_error_reports_offset() {
        let err = parse(b"{\"a\":\n  tru}").unwrap_err();
        match err {
            ParseError::Syntax { offset, .. } => assert!((8..=11).contains(&offset), "{offset}"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn missing_field_names_it() {
        let err = parse(br#"{"program_version":"original","run_index":0,"variables":[]}"#)
            .unwrap_err();
        match err {
            ParseError::Validation { field, .. } => assert_eq!(field, "test_id"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let text = String::from_utf8(serialize(&sample())).unwrap();
        let broken = text.replace("\"size\":2", "\"size\":3");
        assert_ne!(text, broken);
        match parse(broken.as_bytes()).unwrap_err() {
            ParseError::Validation { field, message } => {
                assert_eq!(field, "variables[0].nodes[0]");
                assert!(message.contains("size 3"));
            }
            other => panic!("{other}"),
        }
    }
}
