//! Hierarchical decomposition of a document into addressable nodes.

use std::collections::HashMap;

use regex::Regex;
use serde::{Deserialize, Serialize};
use std::sync::LazyLock;

use crate::patos::DocId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageIndexNode {
    pub node_id: String,
    pub title: String,
    pub summary: String,
    pub children: Vec<PageIndexNode>,
}

impl PageIndexNode {
    fn visit<'a>(&'a self, out: &mut Vec<&'a PageIndexNode>) {
        out.push(self);
        for c in &self.children {
            c.visit(out);
        }
    }
}

/// A page index pinned to one exact document version via its checksum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageIndexTree {
    pub doc_id: DocId,
    pub doc_checksum: String,
    pub reader_id: String,
    pub roots: Vec<PageIndexNode>,
}

impl PageIndexTree {
    /// Nodes in document (pre-)order.
    pub fn nodes(&self) -> Vec<&PageIndexNode> {
        let mut out = Vec::new();
        for r in &self.roots {
            r.visit(&mut out);
        }
        out
    }

    pub fn find(&self, node_id: &str) -> Option<&PageIndexNode> {
        self.nodes().into_iter().find(|n| n.node_id == node_id)
    }

    pub fn contains(&self, node_id: &str) -> bool {
        self.find(node_id).is_some()
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("reader {reader_id} failed: {message}")]
pub struct ReaderFailure {
    pub reader_id: String,
    pub message: String,
}

/// Anything that can turn a document's text artifact into a node hierarchy.
/// Model-backed readers implement the same trait as [`StubReader`].
pub trait Reader: Send + Sync {
    fn reader_id(&self) -> &str;
    fn read(&self, text: &str) -> Result<Vec<PageIndexNode>, ReaderFailure>;
}

static HEADING: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(\d+(?:\.\d+)*)\s+(.*)$").expect("valid heading regex"));

/// Deterministic reader: numbered heading lines (`1`, `1.3`, `2.1.4` followed by
/// whitespace) open nodes; the first sentence of the body becomes the summary.
#[derive(Debug, Clone, Default)]
pub struct StubReader;

impl StubReader {
    pub const ID: &'static str = "stub";
}

struct FlatNode {
    node_id: String,
    title: String,
    body: Vec<String>,
    parent: Option<usize>,
}

fn first_sentence(body: &[String]) -> String {
    let text = body.iter().map(|l| l.trim()).filter(|l| !l.is_empty()).collect::<Vec<_>>().join(" ");
    let chars: Vec<char> = text.chars().collect();
    for (i, c) in chars.iter().enumerate() {
        if matches!(c, '.' | '?' | '!') && chars.get(i + 1).is_none_or(|n| n.is_whitespace()) {
            return chars[..=i].iter().collect();
        }
    }
    text
}

fn parent_id(node_id: &str) -> Option<&str> {
    node_id.rsplit_once('.').map(|(p, _)| p)
}

impl Reader for StubReader {
    fn reader_id(&self) -> &str {
        Self::ID
    }

    fn read(&self, text: &str) -> Result<Vec<PageIndexNode>, ReaderFailure> {
        let fail = |message: String| ReaderFailure { reader_id: Self::ID.into(), message };
        let mut flat: Vec<FlatNode> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        for line in text.lines() {
            let line = line.trim_end();
            if let Some(cap) = HEADING.captures(line) {
                let node_id = cap[1].to_owned();
                if index.contains_key(&node_id) {
                    return Err(fail(format!("duplicate heading {node_id}")));
                }
                let parent = parent_id(&node_id).and_then(|p| index.get(p).copied());
                index.insert(node_id.clone(), flat.len());
                flat.push(FlatNode { node_id, title: cap[2].trim().to_owned(), body: Vec::new(), parent });
            } else if let Some(last) = flat.last_mut() {
                last.body.push(line.to_owned());
            }
        }
        if flat.is_empty() {
            return Err(fail("no numbered headings found".into()));
        }

        let mut children: Vec<Vec<usize>> = vec![Vec::new(); flat.len()];
        let mut roots = Vec::new();
        for (i, n) in flat.iter().enumerate() {
            match n.parent {
                Some(p) => children[p].push(i),
                None => roots.push(i),
            }
        }
        fn build(i: usize, flat: &[FlatNode], children: &[Vec<usize>]) -> PageIndexNode {
            PageIndexNode {
                node_id: flat[i].node_id.clone(),
                title: flat[i].title.clone(),
                summary: first_sentence(&flat[i].body),
                children: children[i].iter().map(|&c| build(c, flat, children)).collect(),
            }
        }
        Ok(roots.into_iter().map(|r| build(r, &flat, &children)).collect())
    }
}
