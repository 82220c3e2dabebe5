//! Canonical relabeling of captured object graphs.
//!
//! Nodes are renamed to their access path by a breadth-first walk from the
//! root. Children are expanded in label order (fields by code point, then
//! indices numerically). The first arrival at a shared node owns it; every
//! later arrival becomes a back-reference leaf pointing at the owner. This
//! gives the same logical location the same id in every run, which is what
//! lets original and mutant graphs be matched node by node.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;

use super::model::{EdgeLabel, GraphEdge, GraphNode, NodeKind, VariableGraph};
use super::path;
use super::GraphError;
use crate::canonical_json;

pub const DEFAULT_DEPTH_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CanonicalizeOptions {
    /// Nodes at this depth that still have children are replaced by a
    /// truncated marker.
    pub depth_cap: usize,
}

impl Default for CanonicalizeOptions {
    fn default() -> Self {
        CanonicalizeOptions {
            depth_cap: DEFAULT_DEPTH_CAP,
        }
    }
}

pub fn canonicalize(raw: &VariableGraph) -> Result<VariableGraph, GraphError> {
    canonicalize_with(raw, &CanonicalizeOptions::default())
}

/// Follows back-reference chains to the node that owns the data.
fn resolve_alias<'a>(index: &HashMap<&'a str, &'a GraphNode>, id: &'a str) -> Result<&'a str, GraphError> {
    let mut current = id;
    for _ in 0..=index.len() {
        let node = index.get(current).ok_or_else(|| {
            GraphError::Malformed(format!("edge or reference to unknown node {current:?}"))
        })?;
        if node.kind != NodeKind::BackReference {
            return Ok(current);
        }
        current = node.ref_target.as_deref().ok_or_else(|| {
            GraphError::Malformed(format!("back-reference {current:?} without target"))
        })?;
    }
    Err(GraphError::Malformed(format!(
        "back-reference cycle through {id:?}"
    )))
}

pub fn canonicalize_with<'a>(
    raw: &'a VariableGraph,
    options: &CanonicalizeOptions,
) -> Result<VariableGraph, GraphError> {
    if options.depth_cap == 0 {
        return Err(GraphError::Malformed("depth cap must be at least 1".into()));
    }
    let root_name = raw.variable.name.as_str();
    if !path::is_valid_segment(root_name) {
        return Err(GraphError::Malformed(format!(
            "variable name {root_name:?} contains path punctuation"
        )));
    }

    let mut index: HashMap<&str, &GraphNode> = HashMap::with_capacity(raw.nodes.len());
    for node in &raw.nodes {
        if index.insert(node.node_id.as_str(), node).is_some() {
            return Err(GraphError::Malformed(format!(
                "duplicate node id {:?}",
                node.node_id
            )));
        }
    }
    let deref = |id: &'a str| resolve_alias(&index, id);

    let mut children: HashMap<&str, Vec<(&EdgeLabel, &str)>> = HashMap::new();
    for edge in &raw.edges {
        if !index.contains_key(edge.parent.as_str()) || !index.contains_key(edge.child.as_str()) {
            return Err(GraphError::Malformed(format!(
                "edge {:?}{} -> {:?} references an unknown node",
                edge.parent, edge.label, edge.child
            )));
        }
        if let EdgeLabel::Field(name) = &edge.label {
            if !path::is_valid_segment(name) {
                return Err(GraphError::Malformed(format!(
                    "field label {name:?} under {:?} is empty or contains path punctuation",
                    edge.parent
                )));
            }
        }
        children
            .entry(edge.parent.as_str())
            .or_default()
            .push((&edge.label, deref(&edge.child)?));
    }
    for (parent, list) in children.iter_mut() {
        list.sort_by(|a, b| a.0.cmp(b.0));
        if let Some(w) = list.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(GraphError::DuplicateLabel {
                parent: parent.to_string(),
                label: w[0].0.to_string(),
            });
        }
        let node = index[parent];
        if node.kind.is_leaf() {
            return Err(GraphError::Malformed(format!(
                "{} node {parent:?} has children",
                node.kind
            )));
        }
    }

    for node in &raw.nodes {
        check_payload(node, children.get(node.node_id.as_str()))?;
    }

    let root = deref(&raw.root)?;
    if root != raw.root {
        return Err(GraphError::Malformed("root is a back-reference".into()));
    }

    // Connectivity is judged on the full graph, independent of the depth cap.
    let mut reached: HashSet<&str> = HashSet::from([root]);
    let mut stack = vec![root];
    while let Some(id) = stack.pop() {
        for &(_, child) in children.get(id).into_iter().flatten() {
            if reached.insert(child) {
                stack.push(child);
            }
        }
    }
    for node in &raw.nodes {
        if node.kind != NodeKind::BackReference && !reached.contains(node.node_id.as_str()) {
            return Err(GraphError::Disconnected(node.node_id.clone()));
        }
    }

    let mut owner: HashMap<&str, String> = HashMap::new();
    owner.insert(root, root_name.to_string());
    let mut queue = VecDeque::from([Visit::Owned(root, root_name.to_string(), 1usize)]);
    let mut nodes = Vec::with_capacity(raw.nodes.len());
    let mut edges = Vec::with_capacity(raw.edges.len());

    while let Some(visit) = queue.pop_front() {
        let (raw_id, id, depth) = match visit {
            Visit::Owned(raw_id, id, depth) => (raw_id, id, depth),
            Visit::Alias(node) => {
                nodes.push(node);
                continue;
            }
        };
        let node = index[raw_id];
        let kids = children.get(raw_id).map(Vec::as_slice).unwrap_or(&[]);
        if !kids.is_empty() && depth >= options.depth_cap {
            nodes.push(GraphNode {
                node_id: id,
                kind: NodeKind::Truncated,
                type_name: node.type_name.clone(),
                value: None,
                ref_target: None,
                size: None,
            });
            continue;
        }
        let mut out = GraphNode {
            node_id: id.clone(),
            ..node.clone()
        };
        if node.kind == NodeKind::Collection {
            out.size = Some(kids.iter().filter(|(l, _)| l.is_index()).count() as u64);
        }
        nodes.push(out);
        for &(label, child) in kids {
            let child_id = path::child_path(&id, label);
            edges.push(GraphEdge::new(id.clone(), label.clone(), child_id.clone()));
            match owner.get(child) {
                Some(target) => queue.push_back(Visit::Alias(GraphNode::back_reference(
                    child_id,
                    index[child].type_name.clone(),
                    target.clone(),
                ))),
                None => {
                    owner.insert(child, child_id.clone());
                    queue.push_back(Visit::Owned(child, child_id, depth + 1));
                }
            }
        }
    }

    let mut graph = VariableGraph {
        variable: raw.variable.clone(),
        root: root_name.to_string(),
        nodes,
        edges,
        structure_hash: 0,
    };
    graph.structure_hash = structural_hash(&graph);
    Ok(graph)
}

enum Visit<'a> {
    Owned(&'a str, String, usize),
    Alias(GraphNode),
}

fn check_payload(node: &GraphNode, kids: Option<&Vec<(&EdgeLabel, &str)>>) -> Result<(), GraphError> {
    let id = &node.node_id;
    let bad = |what: &str| Err(GraphError::Malformed(format!("{} node {id:?}: {what}", node.kind)));
    if (node.kind == NodeKind::Primitive) != node.value.is_some() {
        return bad("value must be present exactly on primitives");
    }
    if (node.kind == NodeKind::BackReference) != node.ref_target.is_some() {
        return bad("ref_target must be present exactly on back-references");
    }
    if node.kind != NodeKind::Collection && node.size.is_some() {
        return bad("size is only allowed on collections");
    }
    if node.kind == NodeKind::Collection {
        let mut indices: Vec<u64> = kids
            .into_iter()
            .flatten()
            .filter_map(|(l, _)| match l {
                EdgeLabel::Index(i) => Some(*i),
                EdgeLabel::Field(_) => None,
            })
            .collect();
        indices.sort_unstable();
        if indices.iter().enumerate().any(|(k, &i)| k as u64 != i) {
            return bad("index labels must form a contiguous range from 0");
        }
        if let Some(size) = node.size {
            if size != indices.len() as u64 {
                return bad(&format!(
                    "size {size} but {} index edges",
                    indices.len()
                ));
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct HashView<'a> {
    nodes: Vec<RelNode<'a>>,
    edges: Vec<RelEdge<'a>>,
}

#[derive(Serialize)]
struct RelNode<'a> {
    node_id: String,
    kind: NodeKind,
    type_name: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ref_target: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    size: Option<u64>,
}

#[derive(Serialize)]
struct RelEdge<'a> {
    parent: String,
    label: &'a EdgeLabel,
    child: String,
}

/// 64-bit FNV-1a over the root-relative canonical serialization of the
/// graph's nodes and edges.
///
/// Paths are made root-relative so that two variables aliasing the same
/// object hash equal even though their node ids start with different names.
pub fn structural_hash(graph: &VariableGraph) -> u64 {
    let root = graph.root.as_str();
    let rel = |p: &str| {
        if path::is_self_or_descendant(p, root) {
            path::relative(p, root)
        } else {
            p.to_string()
        }
    };
    let view = HashView {
        nodes: graph
            .nodes
            .iter()
            .map(|n| RelNode {
                node_id: rel(&n.node_id),
                kind: n.kind,
                type_name: &n.type_name,
                value: n.value.as_deref(),
                ref_target: n.ref_target.as_deref().map(rel),
                size: n.size,
            })
            .collect(),
        edges: graph
            .edges
            .iter()
            .map(|e| RelEdge {
                parent: rel(&e.parent),
                label: &e.label,
                child: rel(&e.child),
            })
            .collect(),
    };
    canonical_json::fnv1a64(&canonical_json::to_vec(&view))
}
