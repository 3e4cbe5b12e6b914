//! Context graphs: the canonical ontology plus accepted packs, projected
//! into one of four views, and the trace back to source documents.

mod build;
mod graph;
mod materialize;
mod trace;
mod view;

pub use build::{Snapshot, CONTEXT_PREFIX, POPULATION_PREFIX};
pub use graph::*;
pub use materialize::{
    manifest_digest, refract_all, refract_in_memory, Execution, GraphStore, ManifestEntry, MaterializationFailure,
    MaterializationReport,
};
pub use trace::{chain_for, trace, EntryStatus, EntryVerifier, StoreVerifier, TraceChain, TraceEntry};
pub use view::*;

use crate::lector::PackId;
use crate::ontology::{CanonicalLevel, EntityId};

#[derive(Debug, thiserror::Error)]
pub enum RefractionError {
    #[error("{entity_id} is a {level}; {view} needs a {}", view.level())]
    LevelViewMismatch { entity_id: EntityId, level: CanonicalLevel, view: ViewKind },
    #[error("unknown entity {0}")]
    UnknownEntity(EntityId),
    #[error("{entity_id} is linked to {pack_id}, which is not an accepted pack")]
    UnacceptedPack { pack_id: PackId, entity_id: EntityId },
    #[error("unknown graph {0}")]
    UnknownGraph(String),
    #[error("{node_id} is not an assertion node of {graph_id}")]
    NotAnAssertionNode { graph_id: String, node_id: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
