//! Machine-assisted reading artifacts and the evidence pack engine.

mod lifecycle;
mod pack;
mod page_index;
mod store;
mod taxonomy;
mod validate;

pub use lifecycle::{check_transition, is_legal_transition};
pub use pack::*;
pub use page_index::{PageIndexNode, PageIndexTree, Reader, ReaderFailure, StubReader};
pub use store::{build_page_index, LectorStore, SILENCE_ASSERTION};
pub use taxonomy::{illocutionary_class, illocutionary_force, AssertionType, IllocutionaryClass};
pub use validate::*;

use std::collections::BTreeSet;

use crate::patos::{DocId, PatosError};

#[derive(Debug, thiserror::Error)]
pub enum LectorError {
    #[error("pack violates well-formedness conditions {0:?}")]
    StructuralViolation(BTreeSet<u8>),
    #[error("illegal transition {from} -> {to}")]
    IllegalTransition { from: PackState, to: PackState },
    #[error("curator is required")]
    MissingCurator,
    #[error("justification is required")]
    MissingJustification,
    #[error("normative silence needs at least one entry in limits.silences")]
    MissingSilenceEntry,
    #[error("unknown pack {0}")]
    UnknownPack(PackId),
    #[error("document {0} has no cleaned text artifact")]
    DocumentNotCleaned(DocId),
    #[error(transparent)]
    ReaderFailure(#[from] ReaderFailure),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Patos(#[from] PatosError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
