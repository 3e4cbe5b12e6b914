//! Immutable, versioned, content-addressed document preservation.

mod blob;
mod manifest;
mod store;
mod types;

pub use blob::BlobStore;
pub use manifest::{ingest_manifest, read_manifest, Currency, ManifestRecord};
pub use store::{derive_doc_id, replay_state, NewDocument, PatosStore};
pub use types::*;

#[derive(Debug, thiserror::Error)]
pub enum PatosError {
    #[error("document has no bytes")]
    EmptyDocument,
    #[error("invalid lineage: {0}")]
    InvalidLineage(String),
    #[error("version {version_label} already stored with checksum {existing}, offered {offered}")]
    DuplicateVersionConflict {
        version_label: String,
        existing: String,
        offered: String,
    },
    #[error("unknown document {0}")]
    UnknownDocument(DocId),
    #[error("cannot promote {from} to {to}: stages must advance one at a time")]
    SkippedStage { from: MaturityStage, to: MaturityStage },
    #[error("cannot promote {from} to {to}: maturity only moves forward")]
    BackwardPromotion { from: MaturityStage, to: MaturityStage },
    #[error("manifest: {0}")]
    Manifest(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
