use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use super::PatosError;

/// Stable document identifier, derived from lineage, version label and content.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DocId(pub String);

impl DocId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for DocId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for DocId {
    fn from(s: &str) -> Self {
        DocId(s.to_owned())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocKind {
    PatientInsert,
    ProfessionalInsert,
    Monograph,
    Smpc,
    Protocol,
    NormativeAct,
}

impl DocKind {
    pub const ALL: [DocKind; 6] = [
        DocKind::PatientInsert,
        DocKind::ProfessionalInsert,
        DocKind::Monograph,
        DocKind::Smpc,
        DocKind::Protocol,
        DocKind::NormativeAct,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DocKind::PatientInsert => "patient_insert",
            DocKind::ProfessionalInsert => "professional_insert",
            DocKind::Monograph => "monograph",
            DocKind::Smpc => "smpc",
            DocKind::Protocol => "protocol",
            DocKind::NormativeAct => "normative_act",
        }
    }
}

impl FromStr for DocKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DocKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown document kind {s:?}"))
    }
}

/// Groups the versions of one document across time.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LineageKey {
    pub source: String,
    pub registration_id: String,
    pub doc_kind: DocKind,
    pub medication_name: String,
}

impl LineageKey {
    pub fn new(
        source: impl Into<String>,
        registration_id: impl Into<String>,
        doc_kind: DocKind,
        medication_name: impl Into<String>,
    ) -> Self {
        Self {
            source: source.into(),
            registration_id: registration_id.into(),
            doc_kind,
            medication_name: medication_name.into(),
        }
    }

    pub fn validate(&self) -> Result<(), PatosError> {
        for (name, value) in [
            ("source", &self.source),
            ("registration_id", &self.registration_id),
            ("medication_name", &self.medication_name),
        ] {
            if value.trim().is_empty() {
                return Err(PatosError::InvalidLineage(format!("{name} is empty")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MaturityStage {
    Raw,
    Cleaned,
    Structured,
    Curated,
}

impl MaturityStage {
    pub const ALL: [MaturityStage; 4] = [
        MaturityStage::Raw,
        MaturityStage::Cleaned,
        MaturityStage::Structured,
        MaturityStage::Curated,
    ];

    pub fn rank(self) -> u8 {
        self as u8
    }

    pub fn next(self) -> Option<MaturityStage> {
        Self::ALL.get(self.rank() as usize + 1).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MaturityStage::Raw => "RAW",
            MaturityStage::Cleaned => "CLEANED",
            MaturityStage::Structured => "STRUCTURED",
            MaturityStage::Curated => "CURATED",
        }
    }
}

impl fmt::Display for MaturityStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MaturityStage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MaturityStage::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown maturity stage {s:?}"))
    }
}

/// A derived artifact stored in the blob plane when a document is promoted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageArtifact {
    pub stage: MaturityStage,
    pub checksum: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentRef {
    pub doc_id: DocId,
    pub lineage: LineageKey,
    pub version_label: String,
    /// SHA-256 of the RAW bytes exactly as ingested.
    pub checksum: String,
    pub format: String,
    pub capture_date: NaiveDate,
    pub is_current: bool,
    pub maturity: MaturityStage,
    pub active_ingredient: String,
    pub artifacts: Vec<StageArtifact>,
    /// Position in global ingestion order; breaks capture-date ties.
    pub ingest_seq: u64,
}

impl DocumentRef {
    pub fn artifact(&self, stage: MaturityStage) -> Option<&StageArtifact> {
        self.artifacts.iter().find(|a| a.stage == stage)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    Ingested {
        lineage: LineageKey,
        version_label: String,
        checksum: String,
        format: String,
        capture_date: NaiveDate,
        active_ingredient: String,
        is_current: bool,
    },
    Promoted {
        from: MaturityStage,
        to: MaturityStage,
        artifact_checksum: Option<String>,
    },
    MarkedCurrent {
        demoted: Vec<DocId>,
    },
    IntegrityChecked {
        ok: bool,
    },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::Ingested { .. } => "ingested",
            EventKind::Promoted { .. } => "promoted",
            EventKind::MarkedCurrent { .. } => "marked_current",
            EventKind::IntegrityChecked { .. } => "integrity_checked",
        }
    }
}

/// One entry of the append-only provenance log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvenanceEvent {
    pub event_id: String,
    pub seq: u64,
    pub doc_id: DocId,
    pub timestamp: DateTime<Utc>,
    pub detail: String,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegrityStatus {
    Ok,
    Corrupted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlobCheck {
    pub stage: MaturityStage,
    pub expected: String,
    /// `None` when the blob file is missing.
    pub actual: Option<String>,
}

impl BlobCheck {
    pub fn ok(&self) -> bool {
        self.actual.as_deref() == Some(self.expected.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegrityReport {
    pub doc_id: DocId,
    pub status: IntegrityStatus,
    pub checks: Vec<BlobCheck>,
}

impl IntegrityReport {
    pub fn is_ok(&self) -> bool {
        self.status == IntegrityStatus::Ok
    }
}
