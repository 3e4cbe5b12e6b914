use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ontology::CanonicalLevel;

/// The contextual projections a canonical entity can be refracted into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ViewKind {
    #[serde(rename = "CTX_MPP_REGULATORY")]
    Regulatory,
    #[serde(rename = "CTX_VMP_COMPLETE")]
    Prescription,
    #[serde(rename = "CTX_DISPENSATION")]
    Dispensing,
    #[serde(rename = "CTX_SUBSTANCE_PROFILE")]
    SubstanceProfile,
}

pub const REGULATORY_ATTRIBUTES: &[&str] = &[
    "authorization_status",
    "ean",
    "label",
    "marketing_date",
    "registration",
    "regulatory_category",
    "shelf_life",
    "storage",
    "therapeutic_class",
];

pub const PRESCRIPTION_ATTRIBUTES: &[&str] = &[
    "atc",
    "concentration",
    "ddd",
    "form_taxonomy",
    "pharmaceutical_form",
    "quantitative_composition",
    "substance",
];

pub const DISPENSING_ATTRIBUTES: &[&str] = &["pack_size", "prescribable_unit", "primary_packaging"];

pub const PROFILE_ATTRIBUTES: &[&str] = &["dcb", "identifier", "synonym"];

impl ViewKind {
    pub const ALL: [ViewKind; 4] =
        [ViewKind::Regulatory, ViewKind::Prescription, ViewKind::Dispensing, ViewKind::SubstanceProfile];

    pub fn as_str(self) -> &'static str {
        match self {
            ViewKind::Regulatory => "CTX_MPP_REGULATORY",
            ViewKind::Prescription => "CTX_VMP_COMPLETE",
            ViewKind::Dispensing => "CTX_DISPENSATION",
            ViewKind::SubstanceProfile => "CTX_SUBSTANCE_PROFILE",
        }
    }

    /// The level a root entity must have for this view.
    pub fn level(self) -> CanonicalLevel {
        match self {
            ViewKind::Regulatory => CanonicalLevel::Ampp,
            ViewKind::Prescription => CanonicalLevel::Vmp,
            ViewKind::Dispensing => CanonicalLevel::Vmpp,
            ViewKind::SubstanceProfile => CanonicalLevel::Substance,
        }
    }

    /// Attribute keys this view may expose. Fixed per view.
    pub fn attribute_allowlist(self) -> &'static [&'static str] {
        match self {
            ViewKind::Regulatory => REGULATORY_ATTRIBUTES,
            ViewKind::Prescription => PRESCRIPTION_ATTRIBUTES,
            ViewKind::Dispensing => DISPENSING_ATTRIBUTES,
            ViewKind::SubstanceProfile => PROFILE_ATTRIBUTES,
        }
    }

    pub fn for_level(level: CanonicalLevel) -> Vec<ViewKind> {
        Self::ALL.into_iter().filter(|v| v.level() == level).collect()
    }
}

impl fmt::Display for ViewKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ViewKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| format!("unknown view {s:?}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn allowlists_are_sorted_and_pairwise_distinct() {
        for v in ViewKind::ALL {
            let l = v.attribute_allowlist();
            assert!(l.windows(2).all(|w| w[0] < w[1]), "{v}");
        }
        for a in ViewKind::ALL {
            for b in ViewKind::ALL {
                if a != b {
                    assert_ne!(a.attribute_allowlist(), b.attribute_allowlist());
                }
            }
        }
    }

    #[test]
    fn risk_oriented_exclusions() {
        let regulatory: BTreeSet<_> = REGULATORY_ATTRIBUTES.iter().collect();
        for dosing in ["ddd", "concentration", "quantitative_composition", "posology"] {
            assert!(!regulatory.contains(&dosing));
        }
        let dispensing: BTreeSet<_> = DISPENSING_ATTRIBUTES.iter().collect();
        for internal in ["registration", "authorization_status", "regulatory_category"] {
            assert!(!dispensing.contains(&internal));
        }
    }

    #[test]
    fn names_round_trip() {
        for v in ViewKind::ALL {
            assert_eq!(v.as_str().parse::<ViewKind>().unwrap(), v);
            assert_eq!(serde_json::to_string(&v).unwrap(), format!("\"{v}\""));
            assert_eq!(ViewKind::for_level(v.level()), vec![v]);
        }
    }
}
