use std::collections::HashMap;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use chrono::{DateTime, NaiveDate, Utc};

use super::blob::BlobStore;
use super::types::*;
use super::PatosError;
use crate::canonical::sha256_hex;
use crate::clock::Clock;
use crate::journal::Journal;

/// Metadata for a document about to be ingested.
#[derive(Debug, Clone)]
pub struct NewDocument {
    pub lineage: LineageKey,
    pub version_label: String,
    pub format: String,
    pub capture_date: NaiveDate,
    /// Defaults to the lineage's medication name.
    pub active_ingredient: Option<String>,
}

#[derive(Debug, Default)]
struct PatosState {
    docs: HashMap<DocId, DocumentRef>,
    lineages: HashMap<LineageKey, Vec<DocId>>,
    events: Vec<ProvenanceEvent>,
    events_by_doc: HashMap<DocId, Vec<usize>>,
}

impl PatosState {
    fn apply(&mut self, ev: ProvenanceEvent) -> io::Result<()> {
        let corrupt = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
        match &ev.kind {
            EventKind::Ingested {
                lineage,
                version_label,
                checksum,
                format,
                capture_date,
                active_ingredient,
                is_current,
            } => {
                if self.docs.contains_key(&ev.doc_id) {
                    return Err(corrupt(format!("{} ingested twice", ev.doc_id)));
                }
                self.docs.insert(
                    ev.doc_id.clone(),
                    DocumentRef {
                        doc_id: ev.doc_id.clone(),
                        lineage: lineage.clone(),
                        version_label: version_label.clone(),
                        checksum: checksum.clone(),
                        format: format.clone(),
                        capture_date: *capture_date,
                        is_current: *is_current,
                        maturity: MaturityStage::Raw,
                        active_ingredient: active_ingredient.clone(),
                        artifacts: Vec::new(),
                        ingest_seq: ev.seq,
                    },
                );
                self.lineages.entry(lineage.clone()).or_default().push(ev.doc_id.clone());
            }
            EventKind::Promoted { from, to, artifact_checksum } => {
                let doc = self
                    .docs
                    .get_mut(&ev.doc_id)
                    .ok_or_else(|| corrupt(format!("promotion of unknown {}", ev.doc_id)))?;
                if doc.maturity != *from || from.next() != Some(*to) {
                    return Err(corrupt(format!("non-monotone promotion of {}", ev.doc_id)));
                }
                doc.maturity = *to;
                if let Some(c) = artifact_checksum {
                    doc.artifacts.push(StageArtifact { stage: *to, checksum: c.clone() });
                }
            }
            EventKind::MarkedCurrent { .. } => {
                let lineage = self
                    .docs
                    .get(&ev.doc_id)
                    .ok_or_else(|| corrupt(format!("currency of unknown {}", ev.doc_id)))?
                    .lineage
                    .clone();
                for id in &self.lineages[&lineage] {
                    if let Some(d) = self.docs.get_mut(id) {
                        d.is_current = *id == ev.doc_id;
                    }
                }
            }
            EventKind::IntegrityChecked { .. } => {
                if !self.docs.contains_key(&ev.doc_id) {
                    return Err(corrupt(format!("check of unknown {}", ev.doc_id)));
                }
            }
        }
        self.events_by_doc.entry(ev.doc_id.clone()).or_default().push(self.events.len());
        self.events.push(ev);
        Ok(())
    }

    fn next_seq(&self) -> u64 {
        self.events.len() as u64 + 1
    }

    fn doc(&self, id: &DocId) -> Result<&DocumentRef, PatosError> {
        self.docs.get(id).ok_or_else(|| PatosError::UnknownDocument(id.clone()))
    }
}

/// Content-addressed, append-only document repository.
///
/// Layout under `root`:
/// - `blobs/<first2>/<checksum>`: RAW bytes and derived artifacts
/// - `events.jsonl`: the provenance log; replaying it rebuilds all metadata
#[derive(Debug)]
pub struct PatosStore {
    blobs: BlobStore,
    journal: Journal<ProvenanceEvent>,
    clock: Clock,
    state: RwLock<PatosState>,
}

pub fn derive_doc_id(lineage: &LineageKey, version_label: &str, checksum: &str) -> DocId {
    let material = [
        lineage.source.as_str(),
        lineage.registration_id.as_str(),
        lineage.doc_kind.as_str(),
        lineage.medication_name.as_str(),
        version_label,
        checksum,
    ]
    .join("\u{1f}");
    DocId(format!("DOC-{}", &sha256_hex(material.as_bytes())[..24]))
}

impl PatosStore {
    pub fn open(root: impl AsRef<Path>, clock: Clock) -> Result<Self, PatosError> {
        let root = root.as_ref();
        let journal = Journal::new(root.join("events.jsonl"));
        let mut state = PatosState::default();
        for ev in journal.read_all()? {
            state.apply(ev)?;
        }
        Ok(Self {
            blobs: BlobStore::new(root.join("blobs")),
            journal,
            clock,
            state: RwLock::new(state),
        })
    }

    pub fn blobs(&self) -> &BlobStore {
        &self.blobs
    }

    pub fn blob_path(&self, checksum: &str) -> PathBuf {
        self.blobs.path_for(checksum)
    }

    fn record(
        &self,
        state: &mut PatosState,
        doc_id: &DocId,
        kind: EventKind,
        detail: String,
    ) -> Result<(), PatosError> {
        let seq = state.next_seq();
        let ev = ProvenanceEvent {
            event_id: format!("EV-{seq:06}"),
            seq,
            doc_id: doc_id.clone(),
            timestamp: self.clock.now(),
            detail,
            kind,
        };
        self.journal.append(&ev)?;
        state.apply(ev)?;
        Ok(())
    }

    /// Preserves `bytes` at RAW maturity. Re-ingesting identical bytes under the
    /// same lineage and label returns the existing reference.
    pub fn ingest_document(&self, bytes: &[u8], doc: NewDocument) -> Result<DocumentRef, PatosError> {
        if bytes.is_empty() {
            return Err(PatosError::EmptyDocument);
        }
        doc.lineage.validate()?;
        if doc.version_label.trim().is_empty() {
            return Err(PatosError::InvalidLineage("version_label is empty".into()));
        }
        let checksum = sha256_hex(bytes);
        let mut state = self.state.write().expect("patos lock poisoned");

        let siblings = state.lineages.get(&doc.lineage).cloned().unwrap_or_default();
        if let Some(existing) = siblings
            .iter()
            .map(|id| &state.docs[id])
            .find(|d| d.version_label == doc.version_label)
        {
            if existing.checksum == checksum {
                return Ok(existing.clone());
            }
            return Err(PatosError::DuplicateVersionConflict {
                version_label: doc.version_label,
                existing: existing.checksum.clone(),
                offered: checksum,
            });
        }

        self.blobs.put(bytes)?;
        let doc_id = derive_doc_id(&doc.lineage, &doc.version_label, &checksum);
        let is_current = siblings.is_empty();
        let detail = format!("{} bytes, label {}", bytes.len(), doc.version_label);
        let kind = EventKind::Ingested {
            active_ingredient: doc
                .active_ingredient
                .unwrap_or_else(|| doc.lineage.medication_name.clone()),
            lineage: doc.lineage,
            version_label: doc.version_label,
            checksum,
            format: doc.format,
            capture_date: doc.capture_date,
            is_current,
        };
        self.record(&mut state, &doc_id, kind, detail)?;
        Ok(state.docs[&doc_id].clone())
    }

    pub fn get(&self, doc_id: &DocId) -> Result<DocumentRef, PatosError> {
        let state = self.state.read().expect("patos lock poisoned");
        state.doc(doc_id).cloned()
    }

    /// Recomputes the digest of every blob owned by the document.
    pub fn verify_integrity(&self, doc_id: &DocId) -> Result<IntegrityReport, PatosError> {
        let doc = self.get(doc_id)?;
        let report = self.check_blobs(&doc)?;
        let mut state = self.state.write().expect("patos lock poisoned");
        let detail = match report.status {
            IntegrityStatus::Ok => "all blobs verified".to_owned(),
            IntegrityStatus::Corrupted => {
                let bad = report.checks.iter().filter(|c| !c.ok()).count();
                format!("{bad} blob(s) failed verification")
            }
        };
        self.record(&mut state, doc_id, EventKind::IntegrityChecked { ok: report.is_ok() }, detail)?;
        Ok(report)
    }

    /// Read-only verification of the RAW blob; no event is appended.
    pub fn check_raw(&self, doc: &DocumentRef) -> Result<BlobCheck, PatosError> {
        Ok(BlobCheck {
            stage: MaturityStage::Raw,
            expected: doc.checksum.clone(),
            actual: self.blobs.digest_of(&doc.checksum)?,
        })
    }

    fn check_blobs(&self, doc: &DocumentRef) -> Result<IntegrityReport, PatosError> {
        let mut checks = vec![self.check_raw(doc)?];
        for a in &doc.artifacts {
            checks.push(BlobCheck {
                stage: a.stage,
                expected: a.checksum.clone(),
                actual: self.blobs.digest_of(&a.checksum)?,
            });
        }
        let status = if checks.iter().all(BlobCheck::ok) {
            IntegrityStatus::Ok
        } else {
            IntegrityStatus::Corrupted
        };
        Ok(IntegrityReport { doc_id: doc.doc_id.clone(), status, checks })
    }

    /// Versions of a lineage ordered by capture date, then ingestion order.
    pub fn list_versions(&self, lineage: &LineageKey) -> Vec<DocumentRef> {
        let state = self.state.read().expect("patos lock poisoned");
        let mut out: Vec<DocumentRef> = state
            .lineages
            .get(lineage)
            .map(|ids| ids.iter().map(|id| state.docs[id].clone()).collect())
            .unwrap_or_default();
        out.sort_by_key(|d| (d.capture_date, d.ingest_seq));
        out
    }

    pub fn mark_current(&self, doc_id: &DocId) -> Result<DocumentRef, PatosError> {
        let mut state = self.state.write().expect("patos lock poisoned");
        let doc = state.doc(doc_id)?;
        if doc.is_current {
            return Ok(doc.clone());
        }
        let demoted: Vec<DocId> = state.lineages[&doc.lineage]
            .iter()
            .filter(|id| state.docs[*id].is_current)
            .cloned()
            .collect();
        let detail = format!("version {} marked current", doc.version_label);
        self.record(&mut state, doc_id, EventKind::MarkedCurrent { demoted }, detail)?;
        Ok(state.docs[doc_id].clone())
    }

    /// Marks the latest version (capture date, then ingestion order) current.
    pub fn mark_latest_current(&self, lineage: &LineageKey) -> Result<Option<DocumentRef>, PatosError> {
        match self.list_versions(lineage).last() {
            Some(latest) => self.mark_current(&latest.doc_id).map(Some),
            None => Ok(None),
        }
    }

    /// Advances maturity by exactly one stage. A derived artifact, when given,
    /// is stored in the blob plane under its own checksum; RAW is untouched.
    pub fn promote_maturity(
        &self,
        doc_id: &DocId,
        target: MaturityStage,
        derived_artifact: Option<&[u8]>,
    ) -> Result<DocumentRef, PatosError> {
        let mut state = self.state.write().expect("patos lock poisoned");
        let from = state.doc(doc_id)?.maturity;
        if target <= from {
            return Err(PatosError::BackwardPromotion { from, to: target });
        }
        if from.next() != Some(target) {
            return Err(PatosError::SkippedStage { from, to: target });
        }
        let artifact_checksum = derived_artifact.map(|b| self.blobs.put(b)).transpose()?;
        let detail = match &artifact_checksum {
            Some(c) => format!("{from} -> {target}, artifact {}", &c[..12]),
            None => format!("{from} -> {target}"),
        };
        self.record(
            &mut state,
            doc_id,
            EventKind::Promoted { from, to: target, artifact_checksum },
            detail,
        )?;
        Ok(state.docs[doc_id].clone())
    }

    pub fn get_audit_trail(&self, doc_id: &DocId) -> Result<Vec<ProvenanceEvent>, PatosError> {
        let state = self.state.read().expect("patos lock poisoned");
        state.doc(doc_id)?;
        Ok(state.events_by_doc[doc_id].iter().map(|&i| state.events[i].clone()).collect())
    }

    /// The whole provenance log in append order.
    pub fn events(&self) -> Vec<ProvenanceEvent> {
        self.state.read().expect("patos lock poisoned").events.clone()
    }

    /// Bytes of the artifact produced at `stage` (RAW returns the original).
    pub fn read_stage(&self, doc_id: &DocId, stage: MaturityStage) -> Result<Option<Vec<u8>>, PatosError> {
        let doc = self.get(doc_id)?;
        let checksum = match stage {
            MaturityStage::Raw => Some(doc.checksum.clone()),
            s => doc.artifact(s).map(|a| a.checksum.clone()),
        };
        match checksum {
            Some(c) => Ok(Some(self.blobs.get(&c)?)),
            None => Ok(None),
        }
    }

    pub fn documents(&self) -> Vec<DocumentRef> {
        let state = self.state.read().expect("patos lock poisoned");
        let mut docs: Vec<_> = state.docs.values().cloned().collect();
        docs.sort_by_key(|d| d.ingest_seq);
        docs
    }

    pub fn document_map(&self) -> HashMap<DocId, DocumentRef> {
        self.state.read().expect("patos lock poisoned").docs.clone()
    }

    pub fn len(&self) -> usize {
        self.state.read().expect("patos lock poisoned").docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn latest_timestamp(&self) -> Option<DateTime<Utc>> {
        let state = self.state.read().expect("patos lock poisoned");
        state.events.last().map(|e| e.timestamp)
    }
}

/// Rebuilds `(is_current, maturity)` per document from a bare event sequence.
pub fn replay_state(events: &[ProvenanceEvent]) -> io::Result<HashMap<DocId, (bool, MaturityStage)>> {
    let mut state = PatosState::default();
    for ev in events {
        state.apply(ev.clone())?;
    }
    Ok(state
        .docs
        .into_iter()
        .map(|(id, d)| (id, (d.is_current, d.maturity)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn lineage() -> LineageKey {
        LineageKey::new("ANVISA", "186200018", DocKind::ProfessionalInsert, "novalgina")
    }

    fn new_doc(label: &str, day: u32) -> NewDocument {
        NewDocument {
            lineage: lineage(),
            version_label: label.into(),
            format: "pdf".into(),
            capture_date: NaiveDate::from_ymd_opt(2025, 1, day).unwrap(),
            active_ingredient: Some("dipyrone monohydrate".into()),
        }
    }

    fn open(dir: &Path) -> PatosStore {
        PatosStore::open(dir, Clock::System).unwrap()
    }

    #[test]
    fn ingest_records_raw_and_checksum() {
        let dir = tempfile::tempdir().unwrap();
        let store = open(dir.path());
        let d = store.ingest_document(b"hello world\n", new_doc("v1", 1)).unwrap();
        assert_eq!(d.checksum, "a948904f2f0f479b8f8197694b30184b0d2ed1c1cd2a1ec0fb85d299a192a447");
        assert_eq!(d.maturity, MaturityStage::Raw);
        assert!(d.is_current, "first version of a lineage is current");
        assert!(store.blob_path(&d.checksum).ends_with(format!("a9/{}", d.checksum)));
        let trail = store.get_audit_trail(&d.doc_id).unwrap();
        assert_eq!(trail.len(), 1);
        assert_eq!(trail[0].kind.name(), "ingested");
    }

    #[test]
    fn ingest_is_idempotent_and_conflicts_on_different_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let store = open(dir.path());
        let a = store.ingest_document(b"abc", new_doc("v1", 1)).unwrap();
        let b = store.ingest_document(b"abc", new_doc("v1", 1)).unwrap();
        assert_eq!(a.doc_id, b.doc_id);
        assert_eq!(store.list_versions(&lineage()).len(), 1);
        assert_eq!(store.events().len(), 1);
        let err = store.ingest_document(b"abd", new_doc("v1", 1)).unwrap_err();
        assert!(matches!(err, PatosError::DuplicateVersionConflict { .. }));
    }

    #[test]
    fn empty_document_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let store = open(dir.path());
        assert!(matches!(
            store.ingest_document(b"", new_doc("v1", 1)),
            Err(PatosError::EmptyDocument)
        ));
    }

    #[test]
    fn later_versions_leave_currency_alone() {
        let dir = tempfile::tempdir().unwrap();
        let store = open(dir.path());
        let v1 = store.ingest_document(b"one", new_doc("v1", 1)).unwrap();
        let v2 = store.ingest_document(b"two", new_doc("v2", 2)).unwrap();
        assert!(!v2.is_current);
        assert!(store.get(&v1.doc_id).unwrap().is_current);
    }

    #[test]
    fn mark_current_keeps_exactly_one() {
        let dir = tempfile::tempdir().unwrap();
        let store = open(dir.path());
        let ids: Vec<DocId> = (1..=5)
            .map(|i| {
                store
                    .ingest_document(format!("v{i}").as_bytes(), new_doc(&format!("v{i}"), i))
                    .unwrap()
                    .doc_id
            })
            .collect();
        store.mark_current(&ids[2]).unwrap();
        store.mark_current(&ids[4]).unwrap();
        let versions = store.list_versions(&lineage());
        assert_eq!(versions.iter().filter(|d| d.is_current).count(), 1);
        assert!(versions[4].is_current);
        // Both marking events are in the trail of their targets.
        assert_eq!(store.get_audit_trail(&ids[2]).unwrap()[1].kind.name(), "marked_current");
        assert_eq!(store.get_audit_trail(&ids[4]).unwrap()[1].kind.name(), "marked_current");
        // Replaying the event log reproduces the count of current flags.
        let replayed = replay_state(&store.events()).unwrap();
        assert_eq!(replayed.values().filter(|(c, _)| *c).count(), 1);
        assert!(replayed[&ids[4]].0);
        // Marking an already-current doc is a no-op.
        let before = store.events().len();
        store.mark_current(&ids[4]).unwrap();
        assert_eq!(store.events().len(), before);
    }

    #[test]
    fn capture_date_ties_break_by_ingestion_order() {
        let dir = tempfile::tempdir().unwrap();
        let store = open(dir.path());
        store.ingest_document(b"a", new_doc("a", 3)).unwrap();
        let b = store.ingest_document(b"b", new_doc("b", 3)).unwrap();
        store.ingest_document(b"c", new_doc("c", 1)).unwrap();
        let labels: Vec<_> = store.list_versions(&lineage()).into_iter().map(|d| d.version_label).collect();
        assert_eq!(labels, ["c", "a", "b"]);
        assert_eq!(store.mark_latest_current(&lineage()).unwrap().unwrap().doc_id, b.doc_id);
    }

    #[test]
    fn unknown_lineage_lists_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let store = open(dir.path());
        let other = LineageKey::new("X", "1", DocKind::Smpc, "y");
        assert!(store.list_versions(&other).is_empty());
    }

    #[test]
    fn promotion_rules() {
        let dir = tempfile::tempdir().unwrap();
        let store = open(dir.path());
        let d = store.ingest_document(b"%PDF raw", new_doc("v1", 1)).unwrap();
        assert!(matches!(
            store.promote_maturity(&d.doc_id, MaturityStage::Structured, None),
            Err(PatosError::SkippedStage { .. })
        ));
        let c = store.promote_maturity(&d.doc_id, MaturityStage::Cleaned, Some(b"normalized text")).unwrap();
        assert_eq!(c.maturity, MaturityStage::Cleaned);
        assert_eq!(c.checksum, d.checksum);
        assert!(store.verify_integrity(&d.doc_id).unwrap().is_ok());
        assert_eq!(
            store.read_stage(&d.doc_id, MaturityStage::Cleaned).unwrap().unwrap(),
            b"normalized text"
        );
        store.promote_maturity(&d.doc_id, MaturityStage::Structured, None).unwrap();
        store.promote_maturity(&d.doc_id, MaturityStage::Curated, None).unwrap();
        assert!(matches!(
            store.promote_maturity(&d.doc_id, MaturityStage::Raw, None),
            Err(PatosError::BackwardPromotion { .. })
        ));
        assert!(matches!(
            store.promote_maturity(&d.doc_id, MaturityStage::Curated, None),
            Err(PatosError::BackwardPromotion { .. })
        ));
        assert_eq!(store.read_stage(&d.doc_id, MaturityStage::Raw).unwrap().unwrap(), b"%PDF raw");
    }

    #[test]
    fn bit_flip_detected() {
        let dir = tempfile::tempdir().unwrap();
        let store = open(dir.path());
        let d = store.ingest_document(b"some document bytes", new_doc("v1", 1)).unwrap();
        let path = store.blob_path(&d.checksum);
        let mut bytes = fs::read(&path).unwrap();
        bytes[3] ^= 0x01;
        fs::write(&path, &bytes).unwrap();
        let report = store.verify_integrity(&d.doc_id).unwrap();
        assert_eq!(report.status, IntegrityStatus::Corrupted);
        assert_eq!(report.checks[0].actual.as_deref(), Some(sha256_hex(&bytes).as_str()));
    }

    #[test]
    fn unknown_document_errors() {
        let dir = tempfile::tempdir().unwrap();
        let store = open(dir.path());
        let id = DocId::from("DOC-missing");
        assert!(matches!(store.verify_integrity(&id), Err(PatosError::UnknownDocument(_))));
        assert!(matches!(store.get_audit_trail(&id), Err(PatosError::UnknownDocument(_))));
        assert!(matches!(store.mark_current(&id), Err(PatosError::UnknownDocument(_))));
    }

    #[test]
    fn audit_trail_order_and_integrity_counts() {
        let dir = tempfile::tempdir().unwrap();
        let store = open(dir.path());
        store.ingest_document(b"first", new_doc("v1", 1)).unwrap();
        let d = store.ingest_document(b"second", new_doc("v2", 2)).unwrap();
        store.promote_maturity(&d.doc_id, MaturityStage::Cleaned, None).unwrap();
        store.mark_current(&d.doc_id).unwrap();
        let kinds: Vec<_> = store.get_audit_trail(&d.doc_id).unwrap().iter().map(|e| e.kind.name()).collect();
        assert_eq!(kinds, ["ingested", "promoted", "marked_current"]);
        for _ in 0..7 {
            store.verify_integrity(&d.doc_id).unwrap();
        }
        let checks = store
            .get_audit_trail(&d.doc_id)
            .unwrap()
            .iter()
            .filter(|e| e.kind.name() == "integrity_checked")
            .count();
        assert_eq!(checks, 7);
    }

    #[test]
    fn reopen_replays_the_log() {
        let dir = tempfile::tempdir().unwrap();
        let (id, state) = {
            let store = open(dir.path());
            store.ingest_document(b"one", new_doc("v1", 1)).unwrap();
            let d = store.ingest_document(b"two", new_doc("v2", 2)).unwrap();
            store.promote_maturity(&d.doc_id, MaturityStage::Cleaned, Some(b"txt")).unwrap();
            store.mark_current(&d.doc_id).unwrap();
            (d.doc_id.clone(), store.list_versions(&lineage()))
        };
        let store = open(dir.path());
        assert_eq!(store.list_versions(&lineage()), state);
        assert_eq!(store.get(&id).unwrap().maturity, MaturityStage::Cleaned);
    }
}
