use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::view::ViewKind;
use crate::canonical::sha256_hex;
use crate::lector::AssertionType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Entity,
    Attribute,
    Assertion,
    Authority,
    Scope,
    Population,
    ClinicalContext,
    Qualifier,
}

impl NodeKind {
    pub fn is_dimension(self) -> bool {
        matches!(self, NodeKind::Authority | NodeKind::Scope | NodeKind::Population | NodeKind::ClinicalContext)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QualifierKind {
    EvidencePack,
    AssertionType,
    EpistemicLimits,
    CuratorialDecision,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PropValue {
    Text(String),
    List(Vec<String>),
}

impl PropValue {
    pub fn as_text(&self) -> Option<&str> {
        match self {
            PropValue::Text(s) => Some(s),
            PropValue::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[String]> {
        match self {
            PropValue::List(l) => Some(l),
            PropValue::Text(_) => None,
        }
    }
}

impl From<&str> for PropValue {
    fn from(s: &str) -> Self {
        PropValue::Text(s.to_owned())
    }
}

impl From<String> for PropValue {
    fn from(s: String) -> Self {
        PropValue::Text(s)
    }
}

impl From<Vec<String>> for PropValue {
    fn from(l: Vec<String>) -> Self {
        PropValue::List(l)
    }
}

// Field order is alphabetical throughout this file: serializing the structs
// directly then yields the same bytes as the sorted-key canonical form.

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: String,
    pub kind: NodeKind,
    pub label: String,
    #[serde(default)]
    pub props: BTreeMap<String, PropValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qualifier: Option<QualifierKind>,
}

impl GraphNode {
    pub fn new(id: impl Into<String>, kind: NodeKind, label: impl Into<String>) -> Self {
        Self { id: id.into(), kind, label: label.into(), props: BTreeMap::new(), qualifier: None }
    }

    pub fn qualifier(id: impl Into<String>, q: QualifierKind, label: impl Into<String>) -> Self {
        Self { qualifier: Some(q), ..Self::new(id, NodeKind::Qualifier, label) }
    }

    pub fn with_prop(mut self, key: &str, value: impl Into<PropValue>) -> Self {
        self.props.insert(key.to_owned(), value.into());
        self
    }

    pub fn prop(&self, key: &str) -> Option<&str> {
        self.props.get(key).and_then(PropValue::as_text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    HasAttribute,
    Related,
    Asserts,
    BackedBy,
    TypedAs,
    LimitedBy,
    ValidatedBy,
    IssuedBy,
    ValidWhen,
    InvalidWhen,
    AppliesTo,
    DependsOn,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GraphEdge {
    pub from: String,
    pub kind: EdgeKind,
    pub to: String,
}

impl GraphEdge {
    pub fn new(from: impl Into<String>, kind: EdgeKind, to: impl Into<String>) -> Self {
        Self { from: from.into(), kind, to: to.into() }
    }
}

/// A materialized view of one root entity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextGraph {
    pub content_digest: String,
    pub edges: Vec<GraphEdge>,
    pub generated_at: DateTime<Utc>,
    pub graph_id: String,
    pub nodes: Vec<GraphNode>,
    pub root_entity_id: String,
    pub view: ViewKind,
}

#[derive(Serialize)]
struct DigestBody<'a> {
    edges: &'a [GraphEdge],
    graph_id: &'a str,
    nodes: &'a [GraphNode],
    root_entity_id: &'a str,
    view: ViewKind,
}

pub fn graph_id(view: ViewKind, root: &str) -> String {
    format!("{view}__{root}")
}

/// Splits a graph id back into its view and root entity.
pub fn parse_graph_id(id: &str) -> Option<(ViewKind, &str)> {
    let (view, root) = id.split_once("__")?;
    Some((view.parse().ok()?, root))
}

impl ContextGraph {
    /// Sorts nodes and edges, drops duplicates and stamps the digest.
    pub fn seal(
        view: ViewKind,
        root: &str,
        mut nodes: Vec<GraphNode>,
        mut edges: Vec<GraphEdge>,
        generated_at: DateTime<Utc>,
    ) -> Self {
        nodes.sort_by(|a, b| a.id.cmp(&b.id));
        nodes.dedup_by(|a, b| a.id == b.id);
        edges.sort();
        edges.dedup();
        let mut g = ContextGraph {
            content_digest: String::new(),
            edges,
            generated_at,
            graph_id: graph_id(view, root),
            nodes,
            root_entity_id: root.to_owned(),
            view,
        };
        g.content_digest = g.compute_digest();
        g
    }

    pub fn compute_digest(&self) -> String {
        let body = DigestBody {
            edges: &self.edges,
            graph_id: &self.graph_id,
            nodes: &self.nodes,
            root_entity_id: &self.root_entity_id,
            view: self.view,
        };
        sha256_hex(&serde_json::to_vec(&body).expect("graph serializes"))
    }

    pub fn canonical_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("graph serializes")
    }

    pub fn node(&self, id: &str) -> Option<&GraphNode> {
        self.nodes.binary_search_by(|n| n.id.as_str().cmp(id)).ok().map(|i| &self.nodes[i])
    }

    pub fn nodes_of(&self, kind: NodeKind) -> impl Iterator<Item = &GraphNode> {
        self.nodes.iter().filter(move |n| n.kind == kind)
    }

    pub fn assertion_nodes(&self) -> impl Iterator<Item = &GraphNode> {
        self.nodes_of(NodeKind::Assertion)
    }

    pub fn outgoing<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a GraphEdge> {
        self.edges.iter().filter(move |e| e.from == id)
    }

    /// Keys of all attribute nodes.
    pub fn attribute_keys(&self) -> BTreeSet<&str> {
        self.nodes_of(NodeKind::Attribute).filter_map(|n| n.prop("key")).collect()
    }

    pub fn attribute(&self, key: &str) -> Option<&str> {
        self.nodes_of(NodeKind::Attribute)
            .find(|n| n.prop("key") == Some(key))
            .and_then(|n| n.prop("value"))
    }
}

/// Keeps the root, the assertions of the requested types and everything
/// reachable from them through qualifier nodes.
pub fn filter_assertions(graph: &ContextGraph, types: &BTreeSet<AssertionType>) -> ContextGraph {
    let root_node = format!("entity:{}", graph.root_entity_id);
    let mut keep: BTreeSet<&str> = BTreeSet::new();
    keep.insert(&root_node);
    for a in graph.assertion_nodes() {
        let typed = a.prop("assertion_type").and_then(|t| t.parse::<AssertionType>().ok());
        if !typed.is_some_and(|t| types.contains(&t)) {
            continue;
        }
        keep.insert(&a.id);
        for e in graph.outgoing(&a.id) {
            keep.insert(&e.to);
            for d in graph.outgoing(&e.to) {
                keep.insert(&d.to);
            }
        }
    }
    let nodes = graph.nodes.iter().filter(|n| keep.contains(n.id.as_str())).cloned().collect();
    let edges = graph
        .edges
        .iter()
        .filter(|e| keep.contains(e.from.as_str()) && keep.contains(e.to.as_str()))
        .cloned()
        .collect();
    ContextGraph::seal(graph.view, &graph.root_entity_id, nodes, edges, graph.generated_at)
}
