use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use chrono::{DateTime, Utc};

use super::lifecycle::check_transition;
use super::pack::*;
use super::page_index::{PageIndexTree, Reader};
use super::taxonomy::AssertionType;
use super::validate::structural_violations;
use super::LectorError;
use crate::canonical::to_canonical_bytes;
use crate::clock::Clock;
use crate::journal::Journal;
use crate::patos::{DocId, MaturityStage, PatosStore};

/// Response text recorded for normative-silence packs.
pub const SILENCE_ASSERTION: &str = "No regulatory pronouncement identified";

/// Reads the CLEANED text of a document and runs `reader` over it. The tree
/// is pinned to the document's RAW checksum.
pub fn build_page_index(
    patos: &PatosStore,
    doc_id: &DocId,
    reader: &dyn Reader,
) -> Result<PageIndexTree, LectorError> {
    let doc = patos.get(doc_id)?;
    if doc.maturity < MaturityStage::Cleaned {
        return Err(LectorError::DocumentNotCleaned(doc_id.clone()));
    }
    let bytes = patos
        .read_stage(doc_id, MaturityStage::Cleaned)?
        .ok_or_else(|| LectorError::DocumentNotCleaned(doc_id.clone()))?;
    let text = String::from_utf8_lossy(&bytes);
    let roots = reader.read(&text)?;
    Ok(PageIndexTree {
        doc_id: doc.doc_id,
        doc_checksum: doc.checksum,
        reader_id: reader.reader_id().to_owned(),
        roots,
    })
}

#[derive(Debug, Default)]
struct LectorState {
    packs: BTreeMap<PackId, EvidencePack>,
    decisions: Vec<CuratorialDecision>,
    trees: BTreeMap<(DocId, String), PageIndexTree>,
}

/// Packs, curatorial decisions and page index trees.
///
/// Every pack mutation appends a full snapshot to `packs.jsonl`; the last
/// snapshot per id wins on replay. Decisions go to `decisions.jsonl`.
/// Trees live at `page_index/<doc_id>/<reader_id>.json`.
#[derive(Debug)]
pub struct LectorStore {
    root: PathBuf,
    pack_log: Journal<EvidencePack>,
    decision_log: Journal<CuratorialDecision>,
    clock: Clock,
    state: RwLock<LectorState>,
}

fn non_blank(s: &str) -> bool {
    !s.trim().is_empty()
}

impl LectorStore {
    pub fn open(root: impl AsRef<Path>, clock: Clock) -> Result<Self, LectorError> {
        let root = root.as_ref().to_path_buf();
        let pack_log: Journal<EvidencePack> = Journal::new(root.join("packs.jsonl"));
        let decision_log = Journal::new(root.join("decisions.jsonl"));
        let mut state = LectorState::default();
        for p in pack_log.read_all()? {
            state.packs.insert(p.pack_id.clone(), p);
        }
        state.decisions = decision_log.read_all()?;
        let tree_dir = root.join("page_index");
        if tree_dir.is_dir() {
            let mut files = Vec::new();
            for doc_dir in fs::read_dir(&tree_dir)? {
                for f in fs::read_dir(doc_dir?.path())? {
                    files.push(f?.path());
                }
            }
            files.sort();
            for f in files {
                let tree: PageIndexTree = serde_json::from_slice(&fs::read(&f)?)
                    .map_err(|e| LectorError::InvalidInput(format!("{}: {e}", f.display())))?;
                state.trees.insert((tree.doc_id.clone(), tree.reader_id.clone()), tree);
            }
        }
        Ok(Self { root, pack_log, decision_log, clock, state: RwLock::new(state) })
    }

    fn tree_path(&self, doc_id: &DocId, reader_id: &str) -> PathBuf {
        self.root.join("page_index").join(doc_id.as_str()).join(format!("{reader_id}.json"))
    }

    /// Persists a tree, addressable by `(doc_id, reader_id)`.
    pub fn save_tree(&self, tree: PageIndexTree) -> Result<(), LectorError> {
        let path = self.tree_path(&tree.doc_id, &tree.reader_id);
        fs::create_dir_all(path.parent().expect("tree path has parent"))?;
        fs::write(&path, to_canonical_bytes(&tree))?;
        let mut state = self.state.write().expect("lector lock poisoned");
        state.trees.insert((tree.doc_id.clone(), tree.reader_id.clone()), tree);
        Ok(())
    }

    pub fn tree(&self, doc_id: &DocId, reader_id: &str) -> Option<PageIndexTree> {
        let state = self.state.read().expect("lector lock poisoned");
        state.trees.get(&(doc_id.clone(), reader_id.to_owned())).cloned()
    }

    pub fn trees(&self) -> Vec<PageIndexTree> {
        self.state.read().expect("lector lock poisoned").trees.values().cloned().collect()
    }

    pub fn trees_for(&self, doc_id: &DocId) -> Vec<PageIndexTree> {
        let state = self.state.read().expect("lector lock poisoned");
        state.trees.values().filter(|t| &t.doc_id == doc_id).cloned().collect()
    }

    pub fn tree_count(&self) -> usize {
        self.state.read().expect("lector lock poisoned").trees.len()
    }

    fn persist(&self, pack: &EvidencePack) -> Result<(), LectorError> {
        self.pack_log.append(pack)?;
        Ok(())
    }

    fn check_input(input: &PackInput) -> Result<(QualifiedQuestion, EpistemicLimits), LectorError> {
        let violations = structural_violations(input);
        if !violations.is_empty() {
            return Err(LectorError::StructuralViolation(violations));
        }
        if !non_blank(&input.question.text) {
            return Err(LectorError::InvalidInput("question text is empty".into()));
        }
        if !non_blank(&input.response.assertion) {
            return Err(LectorError::InvalidInput("response assertion is empty".into()));
        }
        if !non_blank(&input.focus) {
            return Err(LectorError::InvalidInput("focus is empty".into()));
        }
        let assertion_type: AssertionType =
            input.question.assertion_type.parse().expect("checked by condition 1");
        let limits = input.limits.as_ref().and_then(|l| l.complete()).expect("checked by condition 5");
        Ok((QualifiedQuestion { text: input.question.text.clone(), assertion_type }, limits))
    }

    fn insert_new(&self, input: PackInput, derived_from: Option<PackId>) -> Result<EvidencePack, LectorError> {
        let (question, limits) = Self::check_input(&input)?;
        let mut state = self.state.write().expect("lector lock poisoned");
        if let Some(src) = &derived_from {
            if !state.packs.contains_key(src) {
                return Err(LectorError::UnknownPack(src.clone()));
            }
        }
        let pack = EvidencePack {
            pack_id: PackId::from_seq(state.packs.len() + 1),
            question,
            response: input.response,
            provenance: input.provenance,
            limits,
            status: CuratorialStatus::draft(),
            focus: input.focus,
            derived_from,
            created_at: self.clock.now(),
        };
        self.persist(&pack)?;
        state.packs.insert(pack.pack_id.clone(), pack.clone());
        Ok(pack)
    }

    /// New draft pack. Conditions 1, 2, 4 and 5 must already hold.
    pub fn create_pack(&self, input: PackInput) -> Result<EvidencePack, LectorError> {
        self.insert_new(input, None)
    }

    /// New draft pack that records `source` as its origin; the source is untouched.
    pub fn derive_pack(&self, source: &PackId, input: PackInput) -> Result<EvidencePack, LectorError> {
        self.insert_new(input, Some(source.clone()))
    }

    pub fn record_normative_silence(
        &self,
        question_text: &str,
        focus: &str,
        sections_reviewed: Vec<ProvenanceChainEntry>,
        limits: EpistemicLimits,
    ) -> Result<EvidencePack, LectorError> {
        if limits.silences.is_empty() {
            return Err(LectorError::MissingSilenceEntry);
        }
        let input = PackInput::new(
            QualifiedQuestion { text: question_text.to_owned(), assertion_type: AssertionType::NormativeSilence },
            GroundedResponse {
                assertion: SILENCE_ASSERTION.to_owned(),
                validity_conditions: Vec::new(),
                invalidity_conditions: Vec::new(),
            },
            sections_reviewed,
            limits,
            focus,
        );
        self.create_pack(input)
    }

    pub fn submit_for_review(&self, pack_id: &PackId) -> Result<EvidencePack, LectorError> {
        let mut state = self.state.write().expect("lector lock poisoned");
        let pack = state.packs.get(pack_id).ok_or_else(|| LectorError::UnknownPack(pack_id.clone()))?;
        check_transition(pack.state(), PackState::UnderReview)?;
        let mut next = pack.clone();
        next.status.state = PackState::UnderReview;
        self.persist(&next)?;
        state.packs.insert(pack_id.clone(), next.clone());
        Ok(next)
    }

    /// Terminal human decision. Accepted packs are frozen afterwards.
    pub fn curate(
        &self,
        pack_id: &PackId,
        verdict: Verdict,
        curator: &str,
        justification: &str,
    ) -> Result<(EvidencePack, CuratorialDecision), LectorError> {
        let mut state = self.state.write().expect("lector lock poisoned");
        let pack = state.packs.get(pack_id).ok_or_else(|| LectorError::UnknownPack(pack_id.clone()))?;
        let target = verdict.target_state();
        check_transition(pack.state(), target)?;
        if !non_blank(curator) {
            return Err(LectorError::MissingCurator);
        }
        if !non_blank(justification) {
            return Err(LectorError::MissingJustification);
        }
        let now = self.clock.now();
        let decision = CuratorialDecision {
            decision_id: format!("CD-{:04}", state.decisions.len() + 1),
            pack_id: pack_id.clone(),
            verdict,
            curator: curator.to_owned(),
            justification: justification.to_owned(),
            timestamp: now,
        };
        let mut next = pack.clone();
        next.status = CuratorialStatus {
            state: target,
            curator: Some(curator.to_owned()),
            justification: Some(justification.to_owned()),
            decided_at: Some(now),
        };
        self.decision_log.append(&decision)?;
        self.persist(&next)?;
        state.decisions.push(decision.clone());
        state.packs.insert(pack_id.clone(), next.clone());
        Ok((next, decision))
    }

    pub fn get(&self, pack_id: &PackId) -> Result<EvidencePack, LectorError> {
        let state = self.state.read().expect("lector lock poisoned");
        state.packs.get(pack_id).cloned().ok_or_else(|| LectorError::UnknownPack(pack_id.clone()))
    }

    pub fn packs(&self) -> Vec<EvidencePack> {
        self.state.read().expect("lector lock poisoned").packs.values().cloned().collect()
    }

    pub fn pack_map(&self) -> BTreeMap<PackId, EvidencePack> {
        self.state.read().expect("lector lock poisoned").packs.clone()
    }

    pub fn decisions(&self) -> Vec<CuratorialDecision> {
        self.state.read().expect("lector lock poisoned").decisions.clone()
    }

    pub fn decision_for(&self, pack_id: &PackId) -> Option<CuratorialDecision> {
        let state = self.state.read().expect("lector lock poisoned");
        state.decisions.iter().find(|d| &d.pack_id == pack_id).cloned()
    }

    /// The derivation chain ending at `pack_id`, oldest first.
    pub fn lineage(&self, pack_id: &PackId) -> Result<Vec<PackId>, LectorError> {
        let state = self.state.read().expect("lector lock poisoned");
        let mut chain = Vec::new();
        let mut cur = Some(pack_id.clone());
        while let Some(id) = cur {
            let pack = state.packs.get(&id).ok_or_else(|| LectorError::UnknownPack(id.clone()))?;
            cur = pack.derived_from.clone();
            chain.push(id);
        }
        chain.reverse();
        Ok(chain)
    }

    pub fn latest_timestamp(&self) -> Option<DateTime<Utc>> {
        let state = self.state.read().expect("lector lock poisoned");
        let created = state.packs.values().map(|p| p.created_at);
        let decided = state.decisions.iter().map(|d| d.timestamp);
        created.chain(decided).max()
    }
}
