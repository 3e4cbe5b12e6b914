//! The three stores and the materialization store under one data directory.

use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};

use crate::clock::Clock;
use crate::error::{Error, Result};
use crate::lector::{validate_well_formed, LectorStore, PackId, ValidationReport};
use crate::ontology::{CanonicalLink, EntityId, OntologyStore};
use crate::patos::PatosStore;
use crate::refraction::{
    self, parse_graph_id, ContextGraph, Execution, GraphStore, MaterializationReport, RefractionError, Snapshot,
    StoreVerifier, TraceChain, ViewKind,
};

#[derive(Debug)]
pub struct Corpus {
    root: PathBuf,
    pub patos: PatosStore,
    pub lector: LectorStore,
    pub ontology: OntologyStore,
    pub graphs: GraphStore,
}

impl Corpus {
    pub fn open(data_dir: impl AsRef<Path>, clock: Clock) -> Result<Self> {
        let root = data_dir.as_ref().to_path_buf();
        std::fs::create_dir_all(&root)?;
        Ok(Self {
            patos: PatosStore::open(root.join("patos"), clock.clone())?,
            lector: LectorStore::open(root.join("lector"), clock.clone())?,
            ontology: OntologyStore::open(root.join("ontology"), clock)?,
            graphs: GraphStore::new(root.join("graphs")),
            root,
        })
    }

    pub fn data_dir(&self) -> &Path {
        &self.root
    }

    /// Latest recorded instant across the stores; the epoch when empty.
    /// Graphs are stamped with it so equal snapshots give equal bytes.
    pub fn watermark(&self) -> DateTime<Utc> {
        [self.patos.latest_timestamp(), self.lector.latest_timestamp(), self.ontology.latest_timestamp()]
            .into_iter()
            .flatten()
            .max()
            .unwrap_or(DateTime::UNIX_EPOCH)
    }

    pub fn with_snapshot<R>(&self, f: impl FnOnce(&Snapshot<'_>) -> R) -> R {
        let generated_at = self.watermark();
        let packs = self.lector.pack_map();
        let documents = self.patos.document_map();
        let ontology = self.ontology.read();
        f(&Snapshot { ontology: &ontology, packs: &packs, documents: &documents, generated_at })
    }

    pub fn refract(&self, entity_id: &EntityId, view: ViewKind) -> Result<ContextGraph> {
        Ok(self.with_snapshot(|s| s.refract(entity_id, view))?)
    }

    pub fn refract_all(&self, views: &[ViewKind], execution: Execution) -> Result<MaterializationReport> {
        Ok(self.with_snapshot(|s| refraction::refract_all(s, views, &self.graphs, execution))?)
    }

    /// The materialized graph, or a fresh refraction when the id names a
    /// valid pair that has not been materialized yet.
    pub fn graph(&self, graph_id: &str) -> Result<ContextGraph> {
        if let Some(g) = self.graphs.read(graph_id)? {
            return Ok(g);
        }
        let unknown = || Error::from(RefractionError::UnknownGraph(graph_id.to_owned()));
        let (view, root) = parse_graph_id(graph_id).ok_or_else(unknown)?;
        self.refract(&EntityId::from(root), view).map_err(|_| unknown())
    }

    pub fn trace(&self, graph_id: &str, node_id: &str) -> Result<TraceChain> {
        let graph = self.graph(graph_id)?;
        let packs = self.lector.pack_map();
        Ok(refraction::trace(&graph, node_id, &packs, &self.verifier())?)
    }

    pub fn verifier(&self) -> StoreVerifier<'_> {
        StoreVerifier { patos: &self.patos, lector: Some(&self.lector) }
    }

    pub fn link(&self, pack_id: &PackId, entity_id: &EntityId) -> Result<CanonicalLink> {
        let pack = self.lector.get(pack_id)?;
        Ok(self.ontology.link_evidence(&pack, entity_id)?)
    }

    pub fn validate_pack(&self, pack_id: &PackId) -> Result<ValidationReport> {
        let pack = self.lector.get(pack_id)?;
        Ok(validate_well_formed(&pack.to_unchecked(), Some(&self.patos)))
    }
}
