use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::graph::{ContextGraph, NodeKind};
use super::RefractionError;
use crate::lector::{EvidencePack, LectorStore, PackId, ProvenanceChainEntry};
use crate::patos::{DocId, PatosStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryStatus {
    Verified,
    Corrupted,
    Missing,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub checksum: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub doc_id: DocId,
    pub node_ids: BTreeSet<String>,
    pub status: EntryStatus,
    pub version_label: String,
}

/// Assertion node back to the verified document nodes that ground it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceChain {
    pub assertion_node_id: String,
    pub curator: Option<String>,
    pub entries: Vec<TraceEntry>,
    pub graph_id: String,
    pub justification: Option<String>,
    pub pack_id: PackId,
    pub verified: bool,
}

pub trait EntryVerifier {
    fn verify(&self, entry: &ProvenanceChainEntry) -> (EntryStatus, Option<String>);
}

/// Checks an entry against PATOS and, when given, the page index trees.
pub struct StoreVerifier<'a> {
    pub patos: &'a PatosStore,
    pub lector: Option<&'a LectorStore>,
}

impl EntryVerifier for StoreVerifier<'_> {
    fn verify(&self, entry: &ProvenanceChainEntry) -> (EntryStatus, Option<String>) {
        let Ok(doc) = self.patos.get(&entry.doc_id) else {
            return (EntryStatus::Missing, Some(format!("{} not in store", entry.doc_id)));
        };
        if doc.version_label != entry.version_label {
            return (EntryStatus::Missing, Some(format!("store holds version {}", doc.version_label)));
        }
        if doc.checksum != entry.checksum {
            return (EntryStatus::Corrupted, Some(format!("store checksum is {}", doc.checksum)));
        }
        match self.patos.check_raw(&doc) {
            Ok(c) if c.ok() => {}
            Ok(c) => {
                let actual = c.actual.unwrap_or_else(|| "absent".into());
                return (EntryStatus::Corrupted, Some(format!("blob digest {actual}")));
            }
            Err(e) => return (EntryStatus::Corrupted, Some(e.to_string())),
        }
        if let Some(lector) = self.lector {
            let trees = lector.trees_for(&entry.doc_id);
            let pinned: Vec<_> = trees.iter().filter(|t| t.doc_checksum == doc.checksum).collect();
            for n in &entry.node_ids {
                if !pinned.iter().any(|t| t.contains(n)) {
                    return (EntryStatus::Missing, Some(format!("node {n} not in any page index")));
                }
            }
        }
        (EntryStatus::Verified, None)
    }
}

pub fn trace(
    graph: &ContextGraph,
    assertion_node_id: &str,
    packs: &BTreeMap<PackId, EvidencePack>,
    verifier: &dyn EntryVerifier,
) -> Result<TraceChain, RefractionError> {
    let not_assertion = || RefractionError::NotAnAssertionNode {
        graph_id: graph.graph_id.clone(),
        node_id: assertion_node_id.to_owned(),
    };
    let node = graph.node(assertion_node_id).ok_or_else(not_assertion)?;
    if node.kind != NodeKind::Assertion {
        return Err(not_assertion());
    }
    let pack_id = PackId(node.prop("pack_id").ok_or_else(not_assertion)?.to_owned());
    let pack = packs.get(&pack_id).filter(|p| p.is_accepted()).ok_or_else(|| {
        RefractionError::UnacceptedPack {
            pack_id: pack_id.clone(),
            entity_id: graph.root_entity_id.as_str().into(),
        }
    })?;
    Ok(chain_for(graph.graph_id.clone(), assertion_node_id.to_owned(), pack, verifier))
}

pub fn chain_for(
    graph_id: String,
    assertion_node_id: String,
    pack: &EvidencePack,
    verifier: &dyn EntryVerifier,
) -> TraceChain {
    let entries: Vec<TraceEntry> = pack
        .provenance
        .iter()
        .map(|p| {
            let (status, detail) = verifier.verify(p);
            TraceEntry {
                checksum: p.checksum.clone(),
                detail,
                doc_id: p.doc_id.clone(),
                node_ids: p.node_ids.clone(),
                status,
                version_label: p.version_label.clone(),
            }
        })
        .collect();
    let verified = !entries.is_empty() && entries.iter().all(|e| e.status == EntryStatus::Verified);
    TraceChain {
        assertion_node_id,
        curator: pack.status.curator.clone(),
        entries,
        graph_id,
        justification: pack.status.justification.clone(),
        pack_id: pack.pack_id.clone(),
        verified,
    }
}
