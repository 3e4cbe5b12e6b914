//! Line-delimited import manifest: one JSON record per document.
//!
//! ```text
//! {"source":"ANVISA","registration_id":"186200018","doc_kind":"professional_insert","medication_name":"novalgina","version_label":"20260116","format":"pdf","capture_date":"2026-01-28","path":"novalgina_20260116_prof.pdf"}
//! ```
//!
//! `path` (and the optional `cleaned_path`) are resolved relative to the
//! manifest's directory.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::store::{NewDocument, PatosStore};
use super::types::{DocKind, DocumentRef, LineageKey, MaturityStage};
use super::PatosError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub source: String,
    pub registration_id: String,
    pub doc_kind: DocKind,
    pub medication_name: String,
    pub version_label: String,
    pub format: String,
    pub capture_date: NaiveDate,
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active_ingredient: Option<String>,
    /// Pre-normalized text; when present the document is promoted to CLEANED.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cleaned_path: Option<PathBuf>,
}

impl ManifestRecord {
    pub fn lineage(&self) -> LineageKey {
        LineageKey::new(&self.source, &self.registration_id, self.doc_kind, &self.medication_name)
    }
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRecord>, PatosError> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map_err(|e| PatosError::Manifest(format!("{}:{}: {e}", path.display(), i + 1)))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Currency {
    /// After ingestion, the latest version of every touched lineage becomes current.
    MarkLatest,
    Keep,
}

/// Ingests every record of a manifest. Returns the final state of each ingested document.
pub fn ingest_manifest(
    store: &PatosStore,
    manifest: &Path,
    currency: Currency,
) -> Result<Vec<DocumentRef>, PatosError> {
    let base = manifest.parent().unwrap_or(Path::new("."));
    let records = read_manifest(manifest)?;
    let mut ids = Vec::with_capacity(records.len());
    let mut touched = BTreeSet::new();
    for rec in records {
        let bytes = fs::read(base.join(&rec.path))?;
        let lineage = rec.lineage();
        let doc = store.ingest_document(
            &bytes,
            NewDocument {
                lineage: lineage.clone(),
                version_label: rec.version_label.clone(),
                format: rec.format.clone(),
                capture_date: rec.capture_date,
                active_ingredient: rec.active_ingredient.clone(),
            },
        )?;
        if let Some(cleaned) = &rec.cleaned_path {
            if doc.maturity == MaturityStage::Raw {
                let text = fs::read(base.join(cleaned))?;
                store.promote_maturity(&doc.doc_id, MaturityStage::Cleaned, Some(&text))?;
            }
        }
        touched.insert(lineage);
        ids.push(doc.doc_id);
    }
    if currency == Currency::MarkLatest {
        for lineage in &touched {
            store.mark_latest_current(lineage)?;
        }
    }
    ids.iter().map(|id| store.get(id)).collect()
}
