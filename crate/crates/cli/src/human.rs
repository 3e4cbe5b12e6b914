//! Short plain-text renderings for the default output mode.

use std::fmt::Write;

use plp_core::fixture::FixtureSummary;
use plp_core::lector::{EvidencePack, PageIndexTree, ValidationReport};
use plp_core::metrics::MetricsReport;
use plp_core::patos::{DocumentRef, IntegrityReport};
use plp_core::refraction::{ContextGraph, MaterializationReport, TraceChain};

use crate::BenchReport;

fn join(list: impl IntoIterator<Item = impl ToString>) -> String {
    let v: Vec<String> = list.into_iter().map(|x| x.to_string()).collect();
    if v.is_empty() {
        "none".into()
    } else {
        v.join(", ")
    }
}

pub fn fixture(s: &FixtureSummary) -> String {
    format!(
        "documents {}\npage_index_trees {}\npacks {}\naccepted {}\nrejected {}\nlinks {}\ngraphs {}",
        s.documents,
        s.page_index_trees,
        s.packs,
        s.accepted,
        s.rejected,
        s.links,
        s.materialization.graph_count
    )
}

pub fn documents(docs: &[DocumentRef]) -> String {
    let mut s = format!("ingested {} documents", docs.len());
    for d in docs {
        let current = if d.is_current { " current" } else { "" };
        let _ = write!(
            s,
            "\n{} {} {} {} {}{current}",
            d.doc_id, d.lineage.medication_name, d.lineage.doc_kind.as_str(), d.version_label, d.maturity
        );
    }
    s
}

pub fn integrity(reports: &[IntegrityReport]) -> String {
    let lines: Vec<String> = reports
        .iter()
        .map(|r| {
            let bad = r.checks.iter().filter(|c| !c.ok()).map(|c| c.stage.to_string());
            if r.is_ok() {
                format!("{} ok", r.doc_id)
            } else {
                format!("{} corrupted ({})", r.doc_id, join(bad))
            }
        })
        .collect();
    if lines.is_empty() {
        "no documents".into()
    } else {
        lines.join("\n")
    }
}

pub fn tree(t: &PageIndexTree) -> String {
    format!("{} indexed by {}: {} nodes", t.doc_id, t.reader_id, t.nodes().len())
}

pub fn pack(p: &EvidencePack) -> String {
    format!("{} {} {} \"{}\"", p.pack_id, p.status.state, p.question.assertion_type, p.question.text)
}

pub fn validation(r: &ValidationReport) -> String {
    if r.well_formed {
        return "well formed".into();
    }
    let mut s = format!("violations {}", join(&r.violations));
    if !r.unverifiable.is_empty() {
        let _ = write!(s, "\nunverifiable {}", join(&r.unverifiable));
    }
    s
}

pub fn graph(g: &ContextGraph) -> String {
    format!(
        "{} view {} root {}\nnodes {}\nedges {}\nassertions {}\ndigest {}",
        g.graph_id,
        g.view,
        g.root_entity_id,
        g.nodes.len(),
        g.edges.len(),
        g.assertion_nodes().count(),
        g.content_digest
    )
}

pub fn trace(t: &TraceChain) -> String {
    let mut s = format!(
        "{} from {} ({})\ncurator {}",
        t.assertion_node_id,
        t.pack_id,
        if t.verified { "verified" } else { "not verified" },
        t.curator.as_deref().unwrap_or("none")
    );
    for e in &t.entries {
        let _ = write!(s, "\n  {} {} nodes {} {:?}", e.doc_id, e.version_label, join(&e.node_ids), e.status);
    }
    s
}

pub fn metrics(m: &MetricsReport) -> String {
    let mut s = format!(
        "packs {}\naccepted {}\nrejected {}\nlinks {}\nassertion_types {}\ndocuments {}\npage_index_trees {}\ngraphs {}",
        m.packs_total,
        m.packs_accepted,
        m.packs_rejected,
        m.links_total,
        m.assertion_types.len(),
        m.documents,
        m.page_index_trees,
        m.graphs_materialized
    );
    let _ = write!(
        s,
        "\nprovenance_completeness {:.4}\ninterpretive_traceability {:.4}\ncuratorial_coverage {:.4}\naccountability {:.4}",
        m.provenance_completeness, m.interpretive_traceability, m.curatorial_coverage, m.accountability
    );
    let distinct = m.contextual_differentiation.iter().filter(|p| p.differentiated).count();
    let _ = write!(s, "\ncontextual_differentiation {distinct}/{}", m.contextual_differentiation.len());
    s
}

pub fn materialization(r: &MaterializationReport) -> String {
    format!(
        "graph_count {}\nelapsed {:.3} s\nfailures {}\nmanifest_digest {}",
        r.graph_count,
        r.elapsed.as_secs_f64(),
        r.failures.len(),
        r.manifest_digest
    )
}

pub fn bench(b: &BenchReport) -> String {
    format!(
        "graph_count {}\nelapsed {:.3} s\nexecution {}\nfailures {}\nmanifest_digest {}\ngeneration {:.3} s (not timed)",
        b.graph_count,
        b.elapsed_ms as f64 / 1000.0,
        b.execution,
        b.failures,
        b.manifest_digest,
        b.generation_ms as f64 / 1000.0
    )
}
