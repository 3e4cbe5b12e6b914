//! The six well-formedness conditions for evidence packs.
//!
//! | id | condition |
//! |----|-----------|
//! | 1  | question type belongs to the taxonomy |
//! | 2  | at least one provenance entry |
//! | 3  | every entry's hash matches the preserved document at that version |
//! | 4  | every entry cites at least one page index node |
//! | 5  | all four epistemic-limit lists are present |
//! | 6  | accepted/rejected packs carry curator and justification |

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::pack::{PackInput, UncheckedPack};
use super::taxonomy::AssertionType;
use crate::canonical::is_sha256_hex;
use crate::patos::{DocId, PatosStore};

pub const TYPED_QUESTION: u8 = 1;
pub const SOURCE_ANCHORING: u8 = 2;
pub const INTEGRITY_VERIFIABLE: u8 = 3;
pub const NODE_TRACEABILITY: u8 = 4;
pub const EPISTEMIC_COMPLETENESS: u8 = 5;
pub const CURATORIAL_CLOSURE: u8 = 6;

/// Resolves the checksum recorded for a document version.
pub trait ChecksumLookup {
    fn recorded_checksum(&self, doc_id: &DocId, version_label: &str) -> Option<String>;
}

impl ChecksumLookup for PatosStore {
    fn recorded_checksum(&self, doc_id: &DocId, version_label: &str) -> Option<String> {
        self.get(doc_id)
            .ok()
            .filter(|d| d.version_label == version_label)
            .map(|d| d.checksum)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: BTreeSet<u8>,
    /// Conditions that could not be checked (3 without store access).
    pub unverifiable: BTreeSet<u8>,
    pub well_formed: bool,
}

impl ValidationReport {
    fn new(violations: BTreeSet<u8>, unverifiable: BTreeSet<u8>) -> Self {
        let well_formed = violations.is_empty() && unverifiable.is_empty();
        Self { violations, unverifiable, well_formed }
    }
}

/// Conditions 1, 2, 4 and 5: the ones checkable without the store or status.
pub fn structural_violations(input: &PackInput) -> BTreeSet<u8> {
    let mut v = BTreeSet::new();
    if input.question.assertion_type.parse::<AssertionType>().is_err() {
        v.insert(TYPED_QUESTION);
    }
    if input.provenance.is_empty() {
        v.insert(SOURCE_ANCHORING);
    }
    if input.provenance.iter().any(|p| p.node_ids.is_empty()) {
        v.insert(NODE_TRACEABILITY);
    }
    if input.limits.as_ref().and_then(|l| l.complete()).is_none() {
        v.insert(EPISTEMIC_COMPLETENESS);
    }
    v
}

/// Checks all six conditions. Never fails; problems are reported.
pub fn validate_well_formed(pack: &UncheckedPack, store: Option<&dyn ChecksumLookup>) -> ValidationReport {
    let mut violations = structural_violations(&pack.body);
    let mut unverifiable = BTreeSet::new();
    let provenance = &pack.body.provenance;
    if !provenance.is_empty() {
        match store {
            Some(store) => {
                let all_match = provenance.iter().all(|p| {
                    is_sha256_hex(&p.checksum)
                        && store.recorded_checksum(&p.doc_id, &p.version_label).as_deref()
                            == Some(p.checksum.as_str())
                });
                if !all_match {
                    violations.insert(INTEGRITY_VERIFIABLE);
                }
            }
            None => {
                unverifiable.insert(INTEGRITY_VERIFIABLE);
            }
        }
    }
    if !pack.status.is_closed() {
        violations.insert(CURATORIAL_CLOSURE);
    }
    ValidationReport::new(violations, unverifiable)
}
