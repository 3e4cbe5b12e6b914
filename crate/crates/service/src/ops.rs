//! Operations shared by the HTTP handlers and the CLI, so both paths
//! produce the same values and therefore the same bytes.

use std::collections::BTreeSet;

use base64::Engine;
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use plp_core::lector::{
    AssertionType, CuratorialDecision, EvidencePack, PackId, PackInput, PackState, ValidationReport, Verdict,
};
use plp_core::metrics::{compute_metrics, MetricsReport};
use plp_core::ontology::{CanonicalEntity, CanonicalLink, CanonicalLevel, EntityId, ExternalIdentifier, Synonym};
use plp_core::patos::{DocId, DocKind, DocumentRef, IntegrityReport, LineageKey, NewDocument, ProvenanceEvent};
use plp_core::refraction::{
    filter_assertions, graph_id, ContextGraph, Execution, MaterializationReport, TraceChain, ViewKind,
};
use plp_core::Corpus;

use crate::ApiError;

pub type OpResult<T> = Result<T, ApiError>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestRequest {
    pub source: String,
    pub registration_id: String,
    pub doc_kind: DocKind,
    pub medication_name: String,
    pub version_label: String,
    pub format: String,
    pub capture_date: NaiveDate,
    pub content_base64: String,
    #[serde(default)]
    pub active_ingredient: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurateRequest {
    pub verdict: Verdict,
    #[serde(default)]
    pub justification: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkRequest {
    pub pack_id: PackId,
    pub entity_id: EntityId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurateResponse {
    pub decision: CuratorialDecision,
    pub pack: EvidencePack,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackDetail {
    pub decision: Option<CuratorialDecision>,
    pub lineage: Vec<PackId>,
    pub links: Vec<CanonicalLink>,
    pub pack: EvidencePack,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityDetail {
    pub entity: CanonicalEntity,
    pub graphs: Vec<String>,
    pub identifiers: Vec<ExternalIdentifier>,
    pub links: Vec<CanonicalLink>,
    pub synonyms: Vec<Synonym>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchHit {
    pub display_name: String,
    pub entity_id: EntityId,
    pub level: CanonicalLevel,
    pub matched: String,
}

pub const SEARCH_LIMIT: usize = 50;

pub fn ingest(c: &Corpus, req: IngestRequest) -> OpResult<DocumentRef> {
    let bytes = base64::engine::general_purpose::STANDARD
        .decode(req.content_base64.as_bytes())
        .map_err(|e| ApiError::invalid_input(format!("content_base64: {e}")))?;
    let doc = NewDocument {
        lineage: LineageKey::new(req.source, req.registration_id, req.doc_kind, req.medication_name),
        version_label: req.version_label,
        format: req.format,
        capture_date: req.capture_date,
        active_ingredient: req.active_ingredient,
    };
    Ok(c.patos.ingest_document(&bytes, doc).map_err(plp_core::Error::from)?)
}

pub fn document(c: &Corpus, doc_id: &str) -> OpResult<DocumentRef> {
    Ok(c.patos.get(&DocId(doc_id.to_owned())).map_err(plp_core::Error::from)?)
}

/// All versions of the lineage the document belongs to.
pub fn versions(c: &Corpus, doc_id: &str) -> OpResult<Vec<DocumentRef>> {
    let doc = document(c, doc_id)?;
    Ok(c.patos.list_versions(&doc.lineage))
}

pub fn verify(c: &Corpus, doc_id: &str) -> OpResult<IntegrityReport> {
    Ok(c.patos.verify_integrity(&DocId(doc_id.to_owned())).map_err(plp_core::Error::from)?)
}

pub fn audit(c: &Corpus, doc_id: &str) -> OpResult<Vec<ProvenanceEvent>> {
    Ok(c.patos.get_audit_trail(&DocId(doc_id.to_owned())).map_err(plp_core::Error::from)?)
}

fn is_silence(input: &PackInput) -> bool {
    input.question.assertion_type.parse::<AssertionType>() == Ok(AssertionType::NormativeSilence)
}

/// New draft pack. Normative silences go through the silence rule, which
/// needs an entry in `limits.silences` and fixes the response text.
pub fn create_pack(c: &Corpus, input: PackInput) -> OpResult<EvidencePack> {
    let limits = input.limits.as_ref().and_then(|l| l.complete());
    let pack = match limits {
        Some(limits) if is_silence(&input) && !input.provenance.is_empty() => c.lector.record_normative_silence(
            &input.question.text,
            &input.focus,
            input.provenance,
            limits,
        ),
        _ => c.lector.create_pack(input),
    };
    Ok(pack.map_err(plp_core::Error::from)?)
}

pub fn derive_pack(c: &Corpus, source: &str, input: PackInput) -> OpResult<EvidencePack> {
    Ok(c.lector.derive_pack(&PackId::from(source), input).map_err(plp_core::Error::from)?)
}

pub fn submit(c: &Corpus, pack_id: &str) -> OpResult<EvidencePack> {
    Ok(c.lector.submit_for_review(&PackId::from(pack_id)).map_err(plp_core::Error::from)?)
}

pub fn curate(c: &Corpus, pack_id: &str, curator: &str, req: CurateRequest) -> OpResult<CurateResponse> {
    let (pack, decision) = c
        .lector
        .curate(&PackId::from(pack_id), req.verdict, curator, &req.justification)
        .map_err(plp_core::Error::from)?;
    Ok(CurateResponse { decision, pack })
}

pub fn validate(c: &Corpus, pack_id: &str) -> OpResult<ValidationReport> {
    Ok(c.validate_pack(&PackId::from(pack_id))?)
}

pub fn pack(c: &Corpus, pack_id: &str) -> OpResult<PackDetail> {
    let id = PackId::from(pack_id);
    let pack = c.lector.get(&id).map_err(plp_core::Error::from)?;
    Ok(PackDetail {
        decision: c.lector.decision_for(&id),
        lineage: c.lector.lineage(&id).map_err(plp_core::Error::from)?,
        links: c.ontology.read().links_for_pack(&id).into_iter().cloned().collect(),
        pack,
    })
}

pub fn packs(c: &Corpus, state: Option<PackState>) -> Vec<EvidencePack> {
    c.lector.packs().into_iter().filter(|p| state.is_none_or(|s| p.state() == s)).collect()
}

pub fn link(c: &Corpus, req: LinkRequest) -> OpResult<CanonicalLink> {
    Ok(c.link(&req.pack_id, &req.entity_id)?)
}

pub fn parse_view(view: &str) -> OpResult<ViewKind> {
    view.parse().map_err(|e: String| ApiError::invalid_input(e))
}

/// Comma-separated assertion type names; empty means no filter.
pub fn parse_types(types: Option<&str>) -> OpResult<Option<BTreeSet<AssertionType>>> {
    let Some(types) = types.filter(|t| !t.trim().is_empty()) else { return Ok(None) };
    let set = types
        .split(',')
        .map(|t| t.trim().parse::<AssertionType>().map_err(ApiError::invalid_input))
        .collect::<OpResult<_>>()?;
    Ok(Some(set))
}

pub fn view(
    c: &Corpus,
    entity_id: &str,
    view: ViewKind,
    types: Option<&BTreeSet<AssertionType>>,
) -> OpResult<ContextGraph> {
    let g = c.refract(&EntityId::from(entity_id), view)?;
    Ok(match types {
        Some(t) => filter_assertions(&g, t),
        None => g,
    })
}

pub fn graph(c: &Corpus, graph_id: &str) -> OpResult<ContextGraph> {
    Ok(c.graph(graph_id)?)
}

pub fn trace(c: &Corpus, graph_id: &str, node_id: &str) -> OpResult<TraceChain> {
    Ok(c.trace(graph_id, node_id)?)
}

pub fn refract_all(c: &Corpus, views: &[ViewKind], execution: Execution) -> OpResult<MaterializationReport> {
    Ok(c.refract_all(views, execution)?)
}

pub fn metrics(c: &Corpus) -> OpResult<MetricsReport> {
    Ok(compute_metrics(c)?)
}

pub fn entity(c: &Corpus, entity_id: &str) -> OpResult<EntityDetail> {
    let id = EntityId::from(entity_id);
    let ont = c.ontology.read();
    let entity = ont.get(&id).map_err(plp_core::Error::from)?.clone();
    Ok(EntityDetail {
        graphs: ViewKind::for_level(entity.level).into_iter().map(|v| graph_id(v, entity_id)).collect(),
        identifiers: ont.identifiers_of(&id),
        links: ont.links_for_entity(&id).into_iter().cloned().collect(),
        synonyms: ont.synonyms_of(&id).into_iter().cloned().collect(),
        entity,
    })
}

/// Case-insensitive lookup over identifiers, synonyms and display names.
pub fn search(c: &Corpus, query: &str) -> OpResult<Vec<SearchHit>> {
    let q = query.trim().to_lowercase();
    if q.is_empty() {
        return Err(ApiError::invalid_input("empty search query"));
    }
    let ont = c.ontology.read();
    let mut hits = BTreeSet::new();
    for i in ont.all_identifiers() {
        if i.value.to_lowercase() == q {
            hits.insert((i.entity_id.clone(), format!("{} {}", i.scheme, i.value)));
        }
    }
    for s in ont.all_synonyms() {
        if s.text.to_lowercase().contains(&q) {
            hits.insert((s.entity_id.clone(), s.text.clone()));
        }
    }
    for e in ont.entities() {
        if e.display_name.to_lowercase().contains(&q) || e.entity_id.as_str().to_lowercase() == q {
            hits.insert((e.entity_id.clone(), e.display_name.clone()));
        }
    }
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (id, matched) in hits {
        if !seen.insert(id.clone()) {
            continue;
        }
        let e = ont.get(&id).map_err(plp_core::Error::from)?;
        out.push(SearchHit { display_name: e.display_name.clone(), entity_id: id, level: e.level, matched });
        if out.len() == SEARCH_LIMIT {
            break;
        }
    }
    Ok(out)
}
