//! The evidence pack: question, grounded response, provenance chain,
//! epistemic limits and curatorial status.

use std::collections::BTreeSet;
use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::taxonomy::AssertionType;
use crate::patos::DocId;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PackId(pub String);

impl PackId {
    pub fn from_seq(n: usize) -> Self {
        PackId(format!("EP-{n:03}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PackId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for PackId {
    fn from(s: &str) -> Self {
        PackId(s.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QualifiedQuestion {
    pub text: String,
    pub assertion_type: AssertionType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundedResponse {
    pub assertion: String,
    pub validity_conditions: Vec<String>,
    pub invalidity_conditions: Vec<String>,
}

/// One anchoring source: document, version, hash and the cited page index nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvenanceChainEntry {
    pub doc_id: DocId,
    pub version_label: String,
    pub checksum: String,
    pub node_ids: BTreeSet<String>,
}

/// Divergences, gaps, dependencies and silences. An empty list means
/// "checked, none found"; a missing list is a specification error.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpistemicLimits {
    pub divergences: Vec<String>,
    pub gaps: Vec<String>,
    pub dependencies: Vec<String>,
    pub silences: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PackState {
    Draft,
    UnderReview,
    Accepted,
    Rejected,
}

impl PackState {
    pub const ALL: [PackState; 4] =
        [PackState::Draft, PackState::UnderReview, PackState::Accepted, PackState::Rejected];

    pub fn is_terminal(self) -> bool {
        matches!(self, PackState::Accepted | PackState::Rejected)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PackState::Draft => "draft",
            PackState::UnderReview => "under_review",
            PackState::Accepted => "accepted",
            PackState::Rejected => "rejected",
        }
    }
}

impl fmt::Display for PackState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuratorialStatus {
    pub state: PackState,
    pub curator: Option<String>,
    pub justification: Option<String>,
    pub decided_at: Option<DateTime<Utc>>,
}

impl CuratorialStatus {
    pub fn draft() -> Self {
        Self { state: PackState::Draft, curator: None, justification: None, decided_at: None }
    }

    /// Terminal states carry a non-blank curator and justification.
    pub fn is_closed(&self) -> bool {
        let present = |s: &Option<String>| s.as_deref().is_some_and(|s| !s.trim().is_empty());
        !self.state.is_terminal() || (present(&self.curator) && present(&self.justification))
    }
}

impl Default for CuratorialStatus {
    fn default() -> Self {
        Self::draft()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidencePack {
    pub pack_id: PackId,
    pub question: QualifiedQuestion,
    pub response: GroundedResponse,
    pub provenance: Vec<ProvenanceChainEntry>,
    pub limits: EpistemicLimits,
    pub status: CuratorialStatus,
    pub focus: String,
    pub derived_from: Option<PackId>,
    pub created_at: DateTime<Utc>,
}

impl EvidencePack {
    pub fn assertion_type(&self) -> AssertionType {
        self.question.assertion_type
    }

    pub fn state(&self) -> PackState {
        self.status.state
    }

    pub fn is_accepted(&self) -> bool {
        self.status.state == PackState::Accepted
    }

    /// The loosely typed view used by the validator; same JSON shape.
    pub fn to_unchecked(&self) -> UncheckedPack {
        serde_json::from_value(serde_json::to_value(self).expect("pack serializes"))
            .expect("a typed pack always fits the unchecked shape")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accept,
    Reject,
}

impl Verdict {
    pub fn target_state(self) -> PackState {
        match self {
            Verdict::Accept => PackState::Accepted,
            Verdict::Reject => PackState::Rejected,
        }
    }
}

/// Append-only record of one terminal transition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuratorialDecision {
    pub decision_id: String,
    pub pack_id: PackId,
    pub verdict: Verdict,
    pub curator: String,
    pub justification: String,
    pub timestamp: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UncheckedQuestion {
    pub text: String,
    pub assertion_type: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UncheckedLimits {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divergences: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gaps: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dependencies: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub silences: Option<Vec<String>>,
}

impl UncheckedLimits {
    pub fn complete(&self) -> Option<EpistemicLimits> {
        Some(EpistemicLimits {
            divergences: self.divergences.clone()?,
            gaps: self.gaps.clone()?,
            dependencies: self.dependencies.clone()?,
            silences: self.silences.clone()?,
        })
    }
}

impl From<EpistemicLimits> for UncheckedLimits {
    fn from(l: EpistemicLimits) -> Self {
        Self {
            divergences: Some(l.divergences),
            gaps: Some(l.gaps),
            dependencies: Some(l.dependencies),
            silences: Some(l.silences),
        }
    }
}

/// Content of a pack as submitted from outside: type names are plain strings
/// and the limits structure may be missing, so structural problems are
/// reported as condition ids instead of failing to parse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackInput {
    pub question: UncheckedQuestion,
    pub response: GroundedResponse,
    pub provenance: Vec<ProvenanceChainEntry>,
    #[serde(default)]
    pub limits: Option<UncheckedLimits>,
    pub focus: String,
}

impl PackInput {
    pub fn new(
        question: QualifiedQuestion,
        response: GroundedResponse,
        provenance: Vec<ProvenanceChainEntry>,
        limits: EpistemicLimits,
        focus: impl Into<String>,
    ) -> Self {
        Self {
            question: UncheckedQuestion {
                text: question.text,
                assertion_type: question.assertion_type.as_str().to_owned(),
            },
            response,
            provenance,
            limits: Some(limits.into()),
            focus: focus.into(),
        }
    }
}

/// A pack in serialized form, as read from a file or request body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UncheckedPack {
    #[serde(default)]
    pub pack_id: Option<PackId>,
    #[serde(flatten)]
    pub body: PackInput,
    #[serde(default)]
    pub status: CuratorialStatus,
    #[serde(default)]
    pub derived_from: Option<PackId>,
    #[serde(default)]
    pub created_at: Option<DateTime<Utc>>,
}
