use std::collections::BTreeMap;

use serde::Serialize;

use super::registry::Ontology;
use super::types::CanonicalLevel;
use crate::lector::{EvidencePack, PackState};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageMetrics {
    pub packs_total: usize,
    pub packs_accepted: usize,
    pub packs_rejected: usize,
    pub links_total: usize,
    pub entities_per_level: BTreeMap<CanonicalLevel, usize>,
}

pub fn coverage_metrics<'a>(packs: impl IntoIterator<Item = &'a EvidencePack>, ontology: &Ontology) -> CoverageMetrics {
    let (mut total, mut accepted, mut rejected) = (0, 0, 0);
    for p in packs {
        total += 1;
        match p.state() {
            PackState::Accepted => accepted += 1,
            PackState::Rejected => rejected += 1,
            _ => {}
        }
    }
    CoverageMetrics {
        packs_total: total,
        packs_accepted: accepted,
        packs_rejected: rejected,
        links_total: ontology.link_count(),
        entities_per_level: ontology.entities_per_level(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_corpus_is_all_zero() {
        let m = coverage_metrics(&[], &Ontology::new());
        assert_eq!((m.packs_total, m.packs_accepted, m.packs_rejected, m.links_total), (0, 0, 0, 0));
        assert_eq!(m.entities_per_level.len(), 6);
        assert!(m.entities_per_level.values().all(|&n| n == 0));
    }
}
