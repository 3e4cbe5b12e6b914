use serde_json::{json, Value};

use crate::lector::LectorError;
use crate::ontology::OntologyError;
use crate::patos::PatosError;
use crate::refraction::RefractionError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Patos(#[from] PatosError),
    #[error(transparent)]
    Lector(#[from] LectorError),
    #[error(transparent)]
    Ontology(#[from] OntologyError),
    #[error(transparent)]
    Refraction(#[from] RefractionError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Stable machine-readable code, one per module error variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Patos(e) => patos_code(e),
            Error::Lector(e) => match e {
                LectorError::StructuralViolation(_) => "structural_violation",
                LectorError::IllegalTransition { .. } => "illegal_transition",
                LectorError::MissingCurator => "missing_curator",
                LectorError::MissingJustification => "missing_justification",
                LectorError::MissingSilenceEntry => "missing_silence_entry",
                LectorError::UnknownPack(_) => "unknown_pack",
                LectorError::DocumentNotCleaned(_) => "document_not_cleaned",
                LectorError::ReaderFailure(_) => "reader_failure",
                LectorError::InvalidInput(_) => "invalid_input",
                LectorError::Patos(p) => patos_code(p),
                LectorError::Io(_) => "io_error",
            },
            Error::Ontology(e) => match e {
                OntologyError::LevelMismatch { .. } => "level_mismatch",
                OntologyError::UnknownParent(_) => "unknown_parent",
                OntologyError::IllegalParentLevel { .. } => "illegal_parent_level",
                OntologyError::NotFound { .. } => "not_found",
                OntologyError::AmbiguousIdentifier { .. } => "ambiguous_identifier",
                OntologyError::IdentifierConflict { .. } => "identifier_conflict",
                OntologyError::UnknownEntity(_) => "unknown_entity",
                OntologyError::PackNotAccepted(_) => "pack_not_accepted",
                OntologyError::DuplicateLink { .. } => "duplicate_link",
                OntologyError::InvalidAttribute { .. } => "invalid_attribute",
                OntologyError::Io(_) => "io_error",
            },
            Error::Refraction(e) => match e {
                RefractionError::LevelViewMismatch { .. } => "level_view_mismatch",
                RefractionError::UnknownEntity(_) => "unknown_entity",
                RefractionError::UnacceptedPack { .. } => "unaccepted_pack",
                RefractionError::UnknownGraph(_) => "unknown_graph",
                RefractionError::NotAnAssertionNode { .. } => "not_an_assertion_node",
                RefractionError::Io(_) => "io_error",
            },
            Error::InvalidInput(_) => "invalid_input",
            Error::Io(_) => "io_error",
        }
    }

    /// Structured payload for callers, when the error carries one.
    pub fn detail(&self) -> Option<Value> {
        match self {
            Error::Lector(LectorError::StructuralViolation(c)) => Some(json!({ "conditions": c })),
            Error::Lector(LectorError::IllegalTransition { from, to }) => Some(json!({ "from": from, "to": to })),
            Error::Patos(PatosError::DuplicateVersionConflict { version_label, existing, offered }) => {
                Some(json!({ "version_label": version_label, "existing": existing, "offered": offered }))
            }
            Error::Refraction(RefractionError::LevelViewMismatch { entity_id, level, view }) => {
                Some(json!({ "entity_id": entity_id, "level": level, "view": view }))
            }
            _ => None,
        }
    }

    /// Errors that name something absent from the corpus.
    pub fn is_not_found(&self) -> bool {
        matches!(
            self.code(),
            "unknown_document" | "unknown_pack" | "unknown_entity" | "unknown_graph" | "not_found"
        )
    }
}

fn patos_code(e: &PatosError) -> &'static str {
    match e {
        PatosError::EmptyDocument => "empty_document",
        PatosError::InvalidLineage(_) => "invalid_lineage",
        PatosError::DuplicateVersionConflict { .. } => "duplicate_version_conflict",
        PatosError::UnknownDocument(_) => "unknown_document",
        PatosError::SkippedStage { .. } => "skipped_stage",
        PatosError::BackwardPromotion { .. } => "backward_promotion",
        PatosError::Manifest(_) => "invalid_manifest",
        PatosError::Io(_) => "io_error",
    }
}
