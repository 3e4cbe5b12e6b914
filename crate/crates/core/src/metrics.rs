//! Corpus-level evaluation metrics.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::Result;
use crate::lector::{AssertionType, PackId};
use crate::ontology::{coverage_metrics, CanonicalLevel};
use crate::refraction::{chain_for, ViewKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewPair {
    pub left: ViewKind,
    pub right: ViewKind,
    pub differentiated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub snapshot_at: DateTime<Utc>,
    /// Set when there is nothing to measure; fractions are then 1.0.
    pub empty: bool,

    pub provenance_completeness: f64,
    pub assertions_total: usize,
    pub assertions_verified: usize,

    pub interpretive_traceability: f64,
    pub packs_traceable: usize,

    pub curatorial_coverage: f64,
    pub packs_total: usize,
    pub packs_accepted: usize,
    pub packs_rejected: usize,

    pub accountability: f64,
    pub decisions_accountable: usize,
    pub decisions_terminal: usize,

    pub contextual_differentiation: Vec<ViewPair>,

    pub links_total: usize,
    pub entities_per_level: BTreeMap<CanonicalLevel, usize>,
    pub documents: usize,
    pub sources: usize,
    pub page_index_trees: usize,
    pub assertion_types: BTreeSet<AssertionType>,
    pub graphs_materialized: usize,
    pub views_materialized: BTreeSet<ViewKind>,
    /// Packs sharing question, type and focus with an earlier pack.
    pub duplicate_questions: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

pub fn compute_metrics(corpus: &Corpus) -> Result<MetricsReport> {
    let packs = corpus.lector.pack_map();
    let decisions = corpus.lector.decisions();
    let documents = corpus.patos.documents();
    let verifier = corpus.verifier();

    let (coverage, occurrences) = corpus.with_snapshot(|snap| -> Result<_> {
        let coverage = coverage_metrics(packs.values(), snap.ontology);
        let mut occurrences: HashMap<PackId, usize> = HashMap::new();
        for (entity, view) in snap.eligible(&ViewKind::ALL) {
            for id in snap.scoped_packs(&entity, view)?.into_keys() {
                *occurrences.entry(id.clone()).or_default() += 1;
            }
        }
        Ok((coverage, occurrences))
    })?;

    let mut assertions_total = 0;
    let mut assertions_verified = 0;
    for (id, n) in &occurrences {
        assertions_total += n;
        let chain = chain_for(String::new(), String::new(), &packs[id], &verifier);
        if chain.verified {
            assertions_verified += n;
        }
    }

    let mut packs_traceable = 0;
    for p in packs.values().filter(|p| p.is_accepted()) {
        let readable = !p.provenance.is_empty()
            && p.provenance.iter().all(|e| {
                let trees = corpus.lector.trees_for(&e.doc_id);
                e.node_ids.iter().all(|n| trees.iter().any(|t| t.contains(n)))
            });
        let decided = corpus.lector.decision_for(&p.pack_id).is_some_and(|d| !d.justification.trim().is_empty());
        if readable && decided {
            packs_traceable += 1;
        }
    }

    let decisions_accountable = decisions
        .iter()
        .filter(|d| !d.curator.trim().is_empty() && !d.justification.trim().is_empty())
        .count();

    let mut contextual_differentiation = Vec::new();
    for (i, a) in ViewKind::ALL.iter().enumerate() {
        for b in &ViewKind::ALL[i + 1..] {
            contextual_differentiation.push(ViewPair {
                left: *a,
                right: *b,
                differentiated: a.attribute_allowlist() != b.attribute_allowlist(),
            });
        }
    }

    let manifest = corpus.graphs.read_manifest()?;
    let mut seen_questions = BTreeSet::new();
    let duplicate_questions = packs
        .values()
        .filter(|p| !seen_questions.insert((&p.question.text, p.question.assertion_type, &p.focus)))
        .count();
    let entity_count: usize = coverage.entities_per_level.values().sum();

    Ok(MetricsReport {
        snapshot_at: corpus.watermark(),
        empty: packs.is_empty() && documents.is_empty() && entity_count == 0,
        provenance_completeness: ratio(assertions_verified, assertions_total),
        assertions_total,
        assertions_verified,
        interpretive_traceability: ratio(packs_traceable, coverage.packs_accepted),
        packs_traceable,
        curatorial_coverage: ratio(coverage.packs_accepted, coverage.packs_total),
        packs_total: coverage.packs_total,
        packs_accepted: coverage.packs_accepted,
        packs_rejected: coverage.packs_rejected,
        accountability: ratio(decisions_accountable, decisions.len()),
        decisions_accountable,
        decisions_terminal: decisions.len(),
        contextual_differentiation,
        links_total: coverage.links_total,
        entities_per_level: coverage.entities_per_level,
        documents: documents.len(),
        sources: documents.iter().map(|d| &d.lineage.source).collect::<BTreeSet<_>>().len(),
        page_index_trees: corpus.lector.tree_count(),
        assertion_types: packs.values().map(|p| p.assertion_type()).collect(),
        graphs_materialized: manifest.len(),
        views_materialized: manifest.iter().map(|m| m.view).collect(),
        duplicate_questions,
    })
}
