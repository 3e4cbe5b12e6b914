//! The dipyrone worked example and the synthetic scale-up ontology.

mod ontology;
mod packs;
mod synthetic;
mod texts;

pub use ontology::{ean_with_check, formulation_vmp, FORMULATIONS, PARTNERS};
pub use packs::{PackSpec, PACKS};
pub use synthetic::{extend_to_graph_count, SyntheticReport};

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Duration, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::clock::Clock;
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::lector::{
    build_page_index, EpistemicLimits, GroundedResponse, PackInput, ProvenanceChainEntry, QualifiedQuestion,
    StubReader, Verdict,
};
use crate::ontology::EntityId;
use crate::patos::{DocKind, DocumentRef, LineageKey, MaturityStage, NewDocument};
use crate::refraction::{Execution, MaterializationReport, ViewKind};

pub mod ids {
    pub const SUBSTANCE: &str = "SUB-000033943";
    pub const VTM: &str = "VTM-000010750";
    pub const VMP: &str = "VMP-000051605";
    pub const VMPP: &str = "VMPP-000103766";
    pub const AMP: &str = "AMP-900000001";
    pub const AMPP: &str = "AMPP-900000001";
    pub const SANOFI: &str = "ORG-000000032";
    pub const EAN: &str = "7891058008635";
}

pub const NOVALGINA_REGISTRATION: &str = "186200018";
pub const ANVISA: &str = "ANVISA";
pub const VERSION_LABELS: [&str; 5] = ["20240215", "20240819", "20250306", "20250722", "20260116"];
pub const CURATORS: [&str; 2] = ["curator.pharm.01", "curator.pharm.02"];

const HOSPITALS: [(&str, &str); 2] = [("Hospital Sirio-Libanes", "hsl"), ("Hospital Albert Einstein", "hae")];
const DATABASE: &str = "Public drug database";
const DATABASE_DOCS: usize = 168;
const INDEXED_DATABASE_DOCS: usize = 7;

pub fn fixture_clock() -> Clock {
    let start = DateTime::parse_from_rfc3339("2026-01-28T09:00:00Z").expect("valid instant").to_utc();
    Clock::stepping(start, Duration::seconds(1))
}

pub fn novalgina_lineage(kind: DocKind) -> LineageKey {
    LineageKey::new(ANVISA, NOVALGINA_REGISTRATION, kind, "novalgina")
}

fn label_date(label: &str) -> NaiveDate {
    NaiveDate::parse_from_str(label, "%Y%m%d").expect("fixture labels are dates")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixtureSummary {
    pub documents: usize,
    pub page_index_trees: usize,
    pub packs: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub links: usize,
    pub materialization: MaterializationReport,
}

struct DocPlan {
    key: String,
    lineage: LineageKey,
    label: String,
    capture: NaiveDate,
    file: String,
    text: String,
    index: bool,
}

fn document_plan() -> Vec<DocPlan> {
    let mut plan = Vec::new();
    for (kind, audience, suffix) in
        [(DocKind::PatientInsert, "patient", "pac"), (DocKind::ProfessionalInsert, "professional", "prof")]
    {
        for (i, label) in VERSION_LABELS.iter().enumerate() {
            let key = match (suffix, i) {
                ("prof", 4) => "prof".to_owned(),
                ("pac", 4) => "pat".to_owned(),
                _ => format!("{suffix}_v{}", i + 1),
            };
            plan.push(DocPlan {
                key,
                lineage: novalgina_lineage(kind),
                label: (*label).to_owned(),
                capture: label_date(label) + Duration::days(12),
                file: format!("{NOVALGINA_REGISTRATION}_{label}_{suffix}.pdf"),
                text: texts::insert_text("NOVALGINA", audience, label),
                index: true,
            });
        }
    }
    for (kind, audience, suffix) in
        [(DocKind::PatientInsert, "patient", "pac"), (DocKind::ProfessionalInsert, "professional", "prof")]
    {
        let label = "20250910";
        plan.push(DocPlan {
            key: format!("generic_{suffix}"),
            lineage: LineageKey::new(ANVISA, "199990001", kind, "dipirona monoidratada"),
            label: label.into(),
            capture: label_date(label) + Duration::days(5),
            file: format!("199990001_{label}_{suffix}.pdf"),
            text: texts::insert_text("DIPIRONA MONOIDRATADA", audience, label),
            index: true,
        });
    }
    for (source, short) in HOSPITALS {
        for (i, (form, conc, _, _)) in FORMULATIONS.iter().take(6).enumerate() {
            let formulation = format!("dipyrone monohydrate {conc} {form}");
            plan.push(DocPlan {
                key: format!("{short}{i}"),
                lineage: LineageKey::new(
                    source,
                    format!("{}-M{:02}", short.to_uppercase(), i + 1),
                    DocKind::Monograph,
                    &formulation,
                ),
                label: "20250301".into(),
                capture: label_date("20250315"),
                file: format!("{short}_monograph_{:02}.pdf", i + 1),
                text: texts::monograph_text(source, &formulation),
                index: true,
            });
        }
    }
    for i in 0..DATABASE_DOCS {
        let presentation = format!("dipyrone presentation {:03}", i + 1);
        plan.push(DocPlan {
            key: format!("db{i}"),
            lineage: LineageKey::new(DATABASE, format!("PDB-{:04}", i + 1), DocKind::Smpc, &presentation),
            label: "20251101".into(),
            capture: label_date("20251105"),
            file: format!("pdb_{:04}.html", i + 1),
            text: texts::smpc_text(&presentation),
            index: i < INDEXED_DATABASE_DOCS,
        });
    }
    plan
}

/// Loads the worked example into an empty corpus and materializes all
/// views. Open the corpus with [`fixture_clock`] for byte-stable output.
pub fn load_dipyrone(corpus: &Corpus) -> Result<FixtureSummary> {
    if !corpus.patos.is_empty() || !corpus.lector.packs().is_empty() || corpus.ontology.read().entity_count() > 0 {
        return Err(Error::InvalidInput("fixture needs an empty data directory".into()));
    }
    let docs = load_documents(corpus)?;
    corpus.ontology.load_records(ontology::records(), &|_| false)?;
    let (accepted, rejected) = load_packs(corpus, &docs)?;
    let materialization = corpus.refract_all(&ViewKind::ALL, Execution::default())?;
    Ok(FixtureSummary {
        documents: corpus.patos.len(),
        page_index_trees: corpus.lector.tree_count(),
        packs: corpus.lector.packs().len(),
        accepted,
        rejected,
        links: corpus.ontology.read().link_count(),
        materialization,
    })
}

fn load_documents(corpus: &Corpus) -> Result<BTreeMap<String, DocumentRef>> {
    let patos = &corpus.patos;
    let mut docs = BTreeMap::new();
    let mut lineages = BTreeSet::new();
    for p in document_plan() {
        let format = if p.file.ends_with(".pdf") { "PDF" } else { "HTML" };
        let doc = patos.ingest_document(
            &texts::raw_capture(&p.file, &p.text),
            NewDocument {
                lineage: p.lineage.clone(),
                version_label: p.label,
                format: format.into(),
                capture_date: p.capture,
                active_ingredient: Some("dipyrone monohydrate".into()),
            },
        )?;
        if p.index {
            patos.promote_maturity(&doc.doc_id, MaturityStage::Cleaned, Some(p.text.as_bytes()))?;
            let tree = build_page_index(patos, &doc.doc_id, &StubReader)?;
            corpus.lector.save_tree(tree)?;
        }
        lineages.insert(p.lineage);
        docs.insert(p.key, doc);
    }
    for lineage in &lineages {
        patos.mark_latest_current(lineage)?;
    }
    for doc in docs.values_mut() {
        *doc = patos.get(&doc.doc_id)?;
    }
    Ok(docs)
}

fn load_packs(corpus: &Corpus, docs: &BTreeMap<String, DocumentRef>) -> Result<(usize, usize)> {
    let lector = &corpus.lector;
    let (mut accepted, mut rejected) = (0, 0);
    let owned = |xs: &[&str]| xs.iter().map(|s| (*s).to_owned()).collect::<Vec<_>>();
    for (n, spec) in PACKS.iter().enumerate() {
        let provenance = spec
            .cites
            .iter()
            .map(|(key, nodes)| {
                let d = &docs[*key];
                ProvenanceChainEntry {
                    doc_id: d.doc_id.clone(),
                    version_label: d.version_label.clone(),
                    checksum: d.checksum.clone(),
                    node_ids: nodes.iter().map(|s| (*s).to_owned()).collect(),
                }
            })
            .collect();
        let (form, conc, _, _) = FORMULATIONS[spec.formulation];
        let focus = format!("dipyrone monohydrate {conc} {form}");
        let limits = EpistemicLimits {
            divergences: owned(spec.divergences),
            gaps: owned(spec.gaps),
            dependencies: owned(spec.dependencies),
            silences: owned(spec.silences),
        };
        let pack = if spec.assertion_type == crate::lector::AssertionType::NormativeSilence {
            lector.record_normative_silence(spec.question, &focus, provenance, limits)?
        } else {
            lector.create_pack(PackInput::new(
                QualifiedQuestion { text: spec.question.into(), assertion_type: spec.assertion_type },
                GroundedResponse {
                    assertion: spec.assertion.into(),
                    validity_conditions: owned(spec.valid),
                    invalidity_conditions: owned(spec.invalid),
                },
                provenance,
                limits,
                focus,
            ))?
        };
        lector.submit_for_review(&pack.pack_id)?;
        let curator = CURATORS[n % CURATORS.len()];
        if spec.reject {
            lector.curate(
                &pack.pack_id,
                Verdict::Reject,
                curator,
                "The source classifies this as a monitored interaction, not a contraindication",
            )?;
            rejected += 1;
            continue;
        }
        let cited: Vec<String> = spec.cites.iter().map(|(_, nodes)| nodes.join("+")).collect();
        lector.curate(
            &pack.pack_id,
            Verdict::Accept,
            curator,
            &format!("Assertion matches the cited source sections {}", cited.join(", ")),
        )?;
        accepted += 1;
        let mut targets = vec![ids::SUBSTANCE.to_owned(), ids::VTM.to_owned(), formulation_vmp(spec.formulation)];
        if spec.formulation == 0 {
            targets.push(ids::AMPP.to_owned());
        }
        for t in targets {
            corpus.link(&pack.pack_id, &EntityId(t))?;
        }
    }
    Ok((accepted, rejected))
}
