//! Persistence for the ontology: one JSONL file of [`OntologyRecord`]s.
//!
//! The same format serves as the bulk-load fixture format and the export
//! format; `load(export())` followed by `export()` is byte-stable.

use std::path::Path;
use std::sync::{RwLock, RwLockReadGuard};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::registry::Ontology;
use super::types::*;
use super::OntologyError;
use crate::clock::Clock;
use crate::journal::Journal;
use crate::lector::{EvidencePack, PackId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum OntologyRecord {
    Organization(Organization),
    Entity(CanonicalEntity),
    Identifier(ExternalIdentifier),
    Synonym(Synonym),
    Link(CanonicalLink),
}

impl Ontology {
    /// Applies one record. Link records are gated by `is_accepted`.
    pub fn apply_record(
        &mut self,
        rec: OntologyRecord,
        is_accepted: &dyn Fn(&PackId) -> bool,
    ) -> Result<(), OntologyError> {
        match rec {
            OntologyRecord::Organization(o) => self.upsert_organization(o),
            OntologyRecord::Entity(e) => {
                self.upsert_entity(e)?;
            }
            OntologyRecord::Identifier(i) => self.add_identifier(i)?,
            OntologyRecord::Synonym(s) => self.add_synonym(s)?,
            OntologyRecord::Link(l) => {
                if !is_accepted(&l.pack_id) {
                    return Err(OntologyError::PackNotAccepted(l.pack_id));
                }
                self.check_link(&l)?;
                self.insert_link(l);
            }
        }
        Ok(())
    }

    /// Deterministic dump: organizations, entities by level then id,
    /// identifiers, synonyms, links.
    pub fn export_records(&self) -> Vec<OntologyRecord> {
        let mut out: Vec<OntologyRecord> =
            self.organizations().cloned().map(OntologyRecord::Organization).collect();
        let mut entities: Vec<&CanonicalEntity> = self.entities().collect();
        entities.sort_by(|a, b| (a.level, &a.entity_id).cmp(&(b.level, &b.entity_id)));
        out.extend(entities.into_iter().cloned().map(OntologyRecord::Entity));
        let mut idents = self.all_identifiers();
        idents.sort_by(|a, b| (&a.entity_id, &a.scheme, &a.value).cmp(&(&b.entity_id, &b.scheme, &b.value)));
        out.extend(idents.into_iter().map(OntologyRecord::Identifier));
        out.extend(self.all_synonyms().cloned().map(OntologyRecord::Synonym));
        out.extend(self.links().cloned().map(OntologyRecord::Link));
        out
    }
}

/// Ontology registry with an append-only record journal.
#[derive(Debug)]
pub struct OntologyStore {
    journal: Journal<OntologyRecord>,
    clock: Clock,
    state: RwLock<Ontology>,
}

impl OntologyStore {
    /// Replays the journal. Links were gated when first written, so replay
    /// does not re-check pack state.
    pub fn open(root: impl AsRef<Path>, clock: Clock) -> Result<Self, OntologyError> {
        let journal = Journal::new(root.as_ref().join("ontology.jsonl"));
        let mut state = Ontology::new();
        for rec in journal.read_all()? {
            state.apply_record(rec, &|_| true)?;
        }
        Ok(Self { journal, clock, state: RwLock::new(state) })
    }

    pub fn read(&self) -> RwLockReadGuard<'_, Ontology> {
        self.state.read().expect("ontology lock poisoned")
    }

    pub fn upsert_entity(&self, entity: CanonicalEntity) -> Result<EntityId, OntologyError> {
        let mut state = self.state.write().expect("ontology lock poisoned");
        state.check_entity(&entity)?;
        self.journal.append(&OntologyRecord::Entity(entity.clone()))?;
        state.upsert_entity(entity)
    }

    pub fn link_evidence(&self, pack: &EvidencePack, entity_id: &EntityId) -> Result<CanonicalLink, OntologyError> {
        let mut state = self.state.write().expect("ontology lock poisoned");
        let link = state.link_evidence(pack, entity_id, self.clock.now())?;
        self.journal.append(&OntologyRecord::Link(link.clone()))?;
        Ok(link)
    }

    /// Validates and applies records in order; everything applied is
    /// journaled in one write. Stops at the first invalid record.
    pub fn load_records(
        &self,
        records: Vec<OntologyRecord>,
        is_accepted: &dyn Fn(&PackId) -> bool,
    ) -> Result<usize, OntologyError> {
        let mut state = self.state.write().expect("ontology lock poisoned");
        let mut applied = Vec::with_capacity(records.len());
        let mut failure = None;
        for rec in records {
            match state.apply_record(rec.clone(), is_accepted) {
                Ok(()) => applied.push(rec),
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
        self.journal.append_all(&applied)?;
        match failure {
            Some(e) => Err(e),
            None => Ok(applied.len()),
        }
    }

    pub fn load_file(&self, path: &Path, is_accepted: &dyn Fn(&PackId) -> bool) -> Result<usize, OntologyError> {
        let records = Journal::<OntologyRecord>::new(path).read_all()?;
        self.load_records(records, is_accepted)
    }

    pub fn export_jsonl(&self) -> String {
        let mut out = String::new();
        for rec in self.read().export_records() {
            out.push_str(&crate::canonical::to_canonical_string(&rec));
            out.push('\n');
        }
        out
    }

    pub fn latest_timestamp(&self) -> Option<DateTime<Utc>> {
        self.read().links().map(|l| l.created_at).max()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn records() -> Vec<OntologyRecord> {
        vec![
            OntologyRecord::Organization(Organization {
                org_id: "ORG-000000032".into(),
                name: "Sanofi Medley".into(),
                role: OrgRole::Manufacturer,
            }),
            OntologyRecord::Entity(CanonicalEntity::new("SUB-000033943", CanonicalLevel::Substance, "dipyrone monohydrate")),
            OntologyRecord::Entity(
                CanonicalEntity::new("VTM-000010750", CanonicalLevel::Vtm, "dipyrone monohydrate").with_parent("SUB-000033943"),
            ),
            OntologyRecord::Identifier(ExternalIdentifier {
                scheme: "CAS".into(),
                value: "5907-38-0".into(),
                entity_id: "SUB-000033943".into(),
            }),
            OntologyRecord::Synonym(Synonym {
                entity_id: "SUB-000033943".into(),
                text: "metamizol".into(),
                language: Some("es".into()),
            }),
        ]
    }

    #[test]
    fn export_round_trip_is_stable() {
        let a = tempfile::tempdir().unwrap();
        let s = OntologyStore::open(a.path(), Clock::System).unwrap();
        s.load_records(records(), &|_| true).unwrap();
        let first = s.export_jsonl();
        let b = tempfile::tempdir().unwrap();
        let file = b.path().join("dump.jsonl");
        std::fs::write(&file, &first).unwrap();
        let t = OntologyStore::open(b.path().join("store"), Clock::System).unwrap();
        t.load_file(&file, &|_| true).unwrap();
        assert_eq!(t.export_jsonl(), first);
        // and the journal replays to the same state
        let reopened = OntologyStore::open(a.path(), Clock::System).unwrap();
        assert_eq!(reopened.export_jsonl(), first);
    }

    #[test]
    fn load_gates_links_on_acceptance() {
        let a = tempfile::tempdir().unwrap();
        let s = OntologyStore::open(a.path(), Clock::System).unwrap();
        let mut recs = records();
        recs.push(OntologyRecord::Link(CanonicalLink {
            link_id: "CL-000001".into(),
            pack_id: "EP-001".into(),
            entity_id: "SUB-000033943".into(),
            created_at: Utc::now(),
        }));
        let err = s.load_records(recs, &|_| false).unwrap_err();
        assert!(matches!(err, OntologyError::PackNotAccepted(_)));
        assert_eq!(s.read().link_count(), 0);
        assert_eq!(s.read().entity_count(), 2);
    }
}
