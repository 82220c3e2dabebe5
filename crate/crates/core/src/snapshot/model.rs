use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// What a node in a captured object graph stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    Object,
    Collection,
    Primitive,
    Null,
    /// A later arrival at a node already owned by an earlier path.
    BackReference,
    /// Marker for a subtree cut off at the depth cap.
    Truncated,
}

impl NodeKind {
    /// Kinds that never carry child edges.
    pub fn is_leaf(self) -> bool {
        matches!(
            self,
            NodeKind::Primitive | NodeKind::Null | NodeKind::BackReference | NodeKind::Truncated
        )
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NodeKind::Object => "object",
            NodeKind::Collection => "collection",
            NodeKind::Primitive => "primitive",
            NodeKind::Null => "null",
            NodeKind::BackReference => "back-reference",
            NodeKind::Truncated => "truncated",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphNode {
    pub node_id: String,
    pub kind: NodeKind,
    pub type_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ref_target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<u64>,
}

impl GraphNode {
    pub fn object(id: impl Into<String>, type_name: impl Into<String>) -> Self {
        Self::bare(id, NodeKind::Object, type_name)
    }

    /// A collection node; the size is filled in by canonicalization when `None`.
    pub fn collection(id: impl Into<String>, type_name: impl Into<String>) -> Self {
        Self::bare(id, NodeKind::Collection, type_name)
    }

    pub fn primitive(
        id: impl Into<String>,
        type_name: impl Into<String>,
        value: impl Into<String>,
    ) -> Self {
        GraphNode {
            value: Some(value.into()),
            ..Self::bare(id, NodeKind::Primitive, type_name)
        }
    }

    pub fn null(id: impl Into<String>, type_name: impl Into<String>) -> Self {
        Self::bare(id, NodeKind::Null, type_name)
    }

    pub fn back_reference(
        id: impl Into<String>,
        type_name: impl Into<String>,
        target: impl Into<String>,
    ) -> Self {
        GraphNode {
            ref_target: Some(target.into()),
            ..Self::bare(id, NodeKind::BackReference, type_name)
        }
    }

    fn bare(id: impl Into<String>, kind: NodeKind, type_name: impl Into<String>) -> Self {
        GraphNode {
            node_id: id.into(),
            kind,
            type_name: type_name.into(),
            value: None,
            ref_target: None,
            size: None,
        }
    }

    /// Canonical one-line rendering of what this node holds, used as the
    /// expected/observed text of nullness and type differences.
    pub fn describe(&self) -> String {
        match self.kind {
            NodeKind::Primitive => self.value.clone().unwrap_or_default(),
            NodeKind::Null => "null".to_string(),
            NodeKind::Object => format!("object:{}", self.type_name),
            NodeKind::Collection => format!("collection:{}", self.type_name),
            NodeKind::BackReference => {
                format!("ref:{}", self.ref_target.as_deref().unwrap_or_default())
            }
            NodeKind::Truncated => format!("truncated:{}", self.type_name),
        }
    }
}

/// Edge label: an object field or a collection index.
///
/// The derived ordering puts every field label before every index label,
/// fields ascending by code point and indices ascending numerically. That is
/// the child expansion order used by canonical BFS.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EdgeLabel {
    Field(String),
    Index(u64),
}

impl EdgeLabel {
    pub fn field(name: impl Into<String>) -> Self {
        EdgeLabel::Field(name.into())
    }

    pub fn is_index(&self) -> bool {
        matches!(self, EdgeLabel::Index(_))
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLabel::Field(name) => write!(f, ".{name}"),
            EdgeLabel::Index(i) => write!(f, "[{i}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphEdge {
    pub parent: String,
    pub label: EdgeLabel,
    pub child: String,
}

impl GraphEdge {
    pub fn new(parent: impl Into<String>, label: EdgeLabel, child: impl Into<String>) -> Self {
        GraphEdge {
            parent: parent.into(),
            label,
            child: child.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariableKind {
    Local,
    TestClassField,
    MethodReturn,
    InstantiatedObject,
    StaticField,
}

/// A memory location immediately reachable from a test's scope.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootVariable {
    pub name: String,
    pub variable_kind: VariableKind,
    /// Disambiguates repeated method returns sharing a name.
    #[serde(default)]
    pub ordinal: u32,
}

impl RootVariable {
    pub fn local(name: impl Into<String>) -> Self {
        RootVariable {
            name: name.into(),
            variable_kind: VariableKind::Local,
            ordinal: 0,
        }
    }

    pub fn new(name: impl Into<String>, variable_kind: VariableKind, ordinal: u32) -> Self {
        RootVariable {
            name: name.into(),
            variable_kind,
            ordinal,
        }
    }
}

impl fmt::Display for RootVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ordinal == 0 {
            write!(f, "{}", self.name)
        } else {
            write!(f, "{}#{}", self.name, self.ordinal)
        }
    }
}

/// The object graph reachable from one root variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableGraph {
    pub variable: RootVariable,
    pub root: String,
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
    #[serde(with = "hex_u64")]
    pub structure_hash: u64,
}

impl VariableGraph {
    /// Starts a raw (not yet canonical) graph; node ids are arbitrary.
    pub fn raw(variable: RootVariable, root: impl Into<String>) -> Self {
        VariableGraph {
            variable,
            root: root.into(),
            nodes: Vec::new(),
            edges: Vec::new(),
            structure_hash: 0,
        }
    }

    pub fn with_node(mut self, node: GraphNode) -> Self {
        self.nodes.push(node);
        self
    }

    pub fn with_edge(mut self, parent: &str, label: EdgeLabel, child: &str) -> Self {
        self.edges.push(GraphEdge::new(parent, label, child));
        self
    }

    pub fn node(&self, id: &str) -> Option<&GraphNode> {
        self.nodes.iter().find(|n| n.node_id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProgramVersion {
    Original,
    Mutant(String),
}

impl ProgramVersion {
    pub fn mutant_id(&self) -> Option<&str> {
        match self {
            ProgramVersion::Original => None,
            ProgramVersion::Mutant(id) => Some(id),
        }
    }
}

impl fmt::Display for ProgramVersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProgramVersion::Original => f.write_str("original"),
            ProgramVersion::Mutant(id) => f.write_str(id),
        }
    }
}

impl Serialize for ProgramVersion {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ProgramVersion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(if s == "original" {
            ProgramVersion::Original
        } else {
            ProgramVersion::Mutant(s)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestOutcome {
    Pass,
    Fail,
}

/// End-of-test state of one test under one program version and run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestRunSnapshot {
    pub program_version: ProgramVersion,
    pub run_index: u32,
    pub test_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<TestOutcome>,
    pub variables: Vec<VariableGraph>,
}

impl TestRunSnapshot {
    pub fn variable(&self, variable: &RootVariable) -> Option<&VariableGraph> {
        self.variables.iter().find(|g| &g.variable == variable)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MutantStatus {
    Killed,
    Survived,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutantEntry {
    pub mutant_id: String,
    pub location: String,
    pub operator: String,
    pub status: MutantStatus,
    pub covering_test_ids: Vec<String>,
}

/// The mutation tool's verdicts plus the test inventory and run count.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutantManifest {
    pub mutants: Vec<MutantEntry>,
    pub tests: Vec<String>,
    pub n_runs: u32,
}

impl MutantManifest {
    pub fn mutant(&self, id: &str) -> Option<&MutantEntry> {
        self.mutants.iter().find(|m| m.mutant_id == id)
    }

    pub fn has_test(&self, id: &str) -> bool {
        self.tests.iter().any(|t| t == id)
    }

    pub fn surviving(&self) -> impl Iterator<Item = &MutantEntry> {
        self.mutants
            .iter()
            .filter(|m| m.status == MutantStatus::Survived)
    }
}

pub(crate) mod hex_u64 {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{v:016x}"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        let s = String::deserialize(d)?;
        u64::from_str_radix(&s, 16).map_err(D::Error::custom)
    }
}
