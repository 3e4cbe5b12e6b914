//! Six-level canonical medication hierarchy, identifiers and evidence links.

mod coverage;
mod registry;
mod store;
mod types;

pub use coverage::{coverage_metrics, CoverageMetrics};
pub use registry::{Direction, HierarchyNode, Ontology};
pub use store::{OntologyRecord, OntologyStore};
pub use types::*;

use crate::lector::PackId;

#[derive(Debug, thiserror::Error)]
pub enum OntologyError {
    #[error("{entity_id} does not carry the prefix for level {level}")]
    LevelMismatch { entity_id: EntityId, level: CanonicalLevel },
    #[error("unknown parent {0}")]
    UnknownParent(EntityId),
    #[error("a {child} cannot have a {parent} parent")]
    IllegalParentLevel { child: CanonicalLevel, parent: CanonicalLevel },
    #[error("no entity carries {scheme} {value}")]
    NotFound { scheme: String, value: String },
    #[error("{scheme} {value} resolves to more than one entity")]
    AmbiguousIdentifier { scheme: String, value: String },
    #[error("{scheme} {value} already belongs to another entity")]
    IdentifierConflict { scheme: String, value: String },
    #[error("unknown entity {0}")]
    UnknownEntity(EntityId),
    #[error("pack {0} is not accepted")]
    PackNotAccepted(PackId),
    #[error("{pack_id} is already linked to {entity_id}")]
    DuplicateLink { pack_id: PackId, entity_id: EntityId },
    #[error("attribute {key}: {reason}")]
    InvalidAttribute { key: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
