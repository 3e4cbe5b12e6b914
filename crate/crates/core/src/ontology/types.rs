use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::lector::PackId;

/// The six canonical levels, most abstract first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CanonicalLevel {
    Substance,
    Vtm,
    Vmp,
    Vmpp,
    Amp,
    Ampp,
}

impl CanonicalLevel {
    pub const ALL: [CanonicalLevel; 6] = [
        CanonicalLevel::Substance,
        CanonicalLevel::Vtm,
        CanonicalLevel::Vmp,
        CanonicalLevel::Vmpp,
        CanonicalLevel::Amp,
        CanonicalLevel::Ampp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CanonicalLevel::Substance => "SUBSTANCE",
            CanonicalLevel::Vtm => "VTM",
            CanonicalLevel::Vmp => "VMP",
            CanonicalLevel::Vmpp => "VMPP",
            CanonicalLevel::Amp => "AMP",
            CanonicalLevel::Ampp => "AMPP",
        }
    }

    /// Identifier prefix, e.g. `SUB` for `SUB-000033943`.
    pub fn prefix(self) -> &'static str {
        match self {
            CanonicalLevel::Substance => "SUB",
            other => other.as_str(),
        }
    }

    pub fn depth(self) -> usize {
        self as usize
    }

    pub fn parent(self) -> Option<CanonicalLevel> {
        self.depth().checked_sub(1).map(|d| Self::ALL[d])
    }

    pub fn child(self) -> Option<CanonicalLevel> {
        Self::ALL.get(self.depth() + 1).copied()
    }

    pub fn from_prefix(prefix: &str) -> Option<CanonicalLevel> {
        Self::ALL.into_iter().find(|l| l.prefix() == prefix)
    }
}

impl fmt::Display for CanonicalLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CanonicalLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown level {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityId(pub String);

impl EntityId {
    pub fn new(level: CanonicalLevel, n: u64) -> Self {
        EntityId(format!("{}-{n:09}", level.prefix()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Level implied by the prefix, if any.
    pub fn level(&self) -> Option<CanonicalLevel> {
        let (prefix, rest) = self.0.split_once('-')?;
        if rest.is_empty() {
            return None;
        }
        CanonicalLevel::from_prefix(prefix)
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EntityId {
    fn from(s: &str) -> Self {
        EntityId(s.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalEntity {
    pub entity_id: EntityId,
    pub level: CanonicalLevel,
    pub display_name: String,
    #[serde(default)]
    pub parent_ids: Vec<EntityId>,
    #[serde(default)]
    pub attributes: BTreeMap<String, String>,
}

impl CanonicalEntity {
    pub fn new(entity_id: impl Into<String>, level: CanonicalLevel, display_name: impl Into<String>) -> Self {
        Self {
            entity_id: EntityId(entity_id.into()),
            level,
            display_name: display_name.into(),
            parent_ids: Vec::new(),
            attributes: BTreeMap::new(),
        }
    }

    pub fn with_parent(mut self, parent: impl Into<String>) -> Self {
        self.parent_ids.push(EntityId(parent.into()));
        self
    }

    pub fn with_attr(mut self, key: &str, value: impl Into<String>) -> Self {
        self.attributes.insert(key.to_owned(), value.into());
        self
    }

    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attributes.get(key).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExternalIdentifier {
    pub scheme: String,
    pub value: String,
    pub entity_id: EntityId,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Synonym {
    pub entity_id: EntityId,
    pub text: String,
    #[serde(default)]
    pub language: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrgRole {
    Manufacturer,
    Regulator,
    Hospital,
    Database,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Organization {
    pub org_id: String,
    pub name: String,
    pub role: OrgRole,
}

/// Binds an accepted evidence pack to a canonical entity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalLink {
    pub link_id: String,
    pub pack_id: PackId,
    pub entity_id: EntityId,
    pub created_at: DateTime<Utc>,
}

/// Correspondence of a canonical level with DM+D and IDMP concepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelMapping {
    pub level: CanonicalLevel,
    pub functional: &'static str,
    pub dmd: Option<&'static str>,
    pub idmp: Option<&'static str>,
}

pub fn map_external_level(level: CanonicalLevel) -> LevelMapping {
    let (functional, dmd, idmp) = match level {
        CanonicalLevel::Substance => ("Substance", Some("Substance"), Some("Substance")),
        CanonicalLevel::Vtm => ("Qualitative Composition", Some("Virtual Therapeutic Moiety"), None),
        CanonicalLevel::Vmp => ("Formulation", Some("Virtual Medicinal Product"), Some("Pharmaceutical Product")),
        CanonicalLevel::Vmpp => ("Pack", Some("Virtual Medicinal Product Pack"), None),
        CanonicalLevel::Amp => ("Product", Some("Actual Medicinal Product"), Some("Medicinal Product")),
        CanonicalLevel::Ampp => (
            "Trade Presentation",
            Some("Actual Medicinal Product Pack"),
            Some("Packaged Medicinal Product"),
        ),
    };
    LevelMapping { level, functional, dmd, idmp }
}
