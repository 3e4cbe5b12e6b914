use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::{DateTime, Utc};

use super::graph::{ContextGraph, EdgeKind, GraphEdge, GraphNode, NodeKind, QualifierKind};
use super::view::ViewKind;
use super::RefractionError;
use crate::lector::{illocutionary_class, illocutionary_force, EvidencePack, PackId};
use crate::ontology::{CanonicalEntity, CanonicalLevel, Direction, EntityId, Ontology};
use crate::patos::{DocId, DocumentRef};

/// An immutable view of the corpus that refraction reads from.
#[derive(Clone, Copy)]
pub struct Snapshot<'a> {
    pub ontology: &'a Ontology,
    pub packs: &'a BTreeMap<PackId, EvidencePack>,
    pub documents: &'a HashMap<DocId, DocumentRef>,
    pub generated_at: DateTime<Utc>,
}

pub const POPULATION_PREFIX: &str = "population:";
pub const CONTEXT_PREFIX: &str = "context:";

impl<'a> Snapshot<'a> {
    fn root(&self, entity_id: &EntityId, view: ViewKind) -> Result<&'a CanonicalEntity, RefractionError> {
        let e = self
            .ontology
            .get(entity_id)
            .map_err(|_| RefractionError::UnknownEntity(entity_id.clone()))?;
        if e.level != view.level() {
            return Err(RefractionError::LevelViewMismatch {
                entity_id: entity_id.clone(),
                level: e.level,
                view,
            });
        }
        Ok(e)
    }

    /// Entities whose links feed the view of `root`.
    pub fn scope_entities(&self, root: &EntityId, view: ViewKind) -> BTreeSet<EntityId> {
        let ont = self.ontology;
        let mut out = BTreeSet::from([root.clone()]);
        match view {
            ViewKind::Regulatory | ViewKind::Dispensing => {
                for child in ont.children_of(root) {
                    if matches!(child.level, CanonicalLevel::Amp | CanonicalLevel::Ampp) {
                        out.insert(child.entity_id.clone());
                        for grand in ont.children_of(&child.entity_id) {
                            if grand.level == CanonicalLevel::Ampp {
                                out.insert(grand.entity_id.clone());
                            }
                        }
                    }
                }
            }
            ViewKind::Prescription => {
                out.extend(ont.closure(root, Direction::Ascend));
                out.extend(ont.closure(root, Direction::Descend));
            }
            ViewKind::SubstanceProfile => {
                out.extend(
                    ont.children_of(root)
                        .filter(|c| c.level == CanonicalLevel::Vtm)
                        .map(|c| c.entity_id.clone()),
                );
            }
        }
        out
    }

    /// Accepted packs in scope for the view. A link to anything else is
    /// an architectural violation.
    pub fn scoped_packs(
        &self,
        root: &EntityId,
        view: ViewKind,
    ) -> Result<BTreeMap<&'a PackId, &'a EvidencePack>, RefractionError> {
        let mut packs = BTreeMap::new();
        for entity in self.scope_entities(root, view) {
            for link in self.ontology.links_for_entity(&entity) {
                match self.packs.get_key_value(&link.pack_id) {
                    Some((id, p)) if p.is_accepted() => {
                        packs.insert(id, p);
                    }
                    _ => {
                        return Err(RefractionError::UnacceptedPack {
                            pack_id: link.pack_id.clone(),
                            entity_id: entity.clone(),
                        })
                    }
                }
            }
        }
        Ok(packs)
    }

    /// The entity followed by its ancestors, nearest first.
    fn lineage(&self, root: &'a CanonicalEntity) -> Vec<&'a CanonicalEntity> {
        let mut out = vec![root];
        let mut seen = BTreeSet::new();
        let mut i = 0;
        while i < out.len() {
            let mut parents: Vec<_> = self.ontology.parents_of(out[i]).collect();
            parents.sort_by(|a, b| a.entity_id.cmp(&b.entity_id));
            for p in parents {
                if seen.insert(&p.entity_id) {
                    out.push(p);
                }
            }
            i += 1;
        }
        out
    }

    fn substance_names(&self, lineage: &[&CanonicalEntity]) -> Option<String> {
        let names: BTreeSet<&str> = lineage
            .iter()
            .filter(|e| e.level == CanonicalLevel::Substance)
            .map(|e| e.display_name.as_str())
            .collect();
        (!names.is_empty()).then(|| names.into_iter().collect::<Vec<_>>().join("; "))
    }

    pub fn refract(&self, entity_id: &EntityId, view: ViewKind) -> Result<ContextGraph, RefractionError> {
        let root = self.root(entity_id, view)?;
        let packs = self.scoped_packs(entity_id, view)?;
        let root_id = format!("entity:{entity_id}");
        let mut nodes = vec![GraphNode::new(&root_id, NodeKind::Entity, &root.display_name)
            .with_prop("level", root.level.as_str())
            .with_prop("entity_id", entity_id.as_str())];
        let mut edges = Vec::new();

        self.add_attributes(root, view, &root_id, &mut nodes, &mut edges);
        self.add_related(root, view, &root_id, &mut nodes, &mut edges);
        for pack in packs.values() {
            self.add_pack(pack, &root_id, &mut nodes, &mut edges);
        }
        Ok(ContextGraph::seal(view, entity_id.as_str(), nodes, edges, self.generated_at))
    }

    fn add_attributes(
        &self,
        root: &'a CanonicalEntity,
        view: ViewKind,
        root_id: &str,
        nodes: &mut Vec<GraphNode>,
        edges: &mut Vec<GraphEdge>,
    ) {
        let mut push = |id: String, key: &str, value: &str, extra: Option<(&str, &str)>| {
            let mut n = GraphNode::new(&id, NodeKind::Attribute, key).with_prop("key", key).with_prop("value", value);
            if let Some((k, v)) = extra {
                n = n.with_prop(k, v);
            }
            nodes.push(n);
            edges.push(GraphEdge::new(root_id, EdgeKind::HasAttribute, id));
        };
        if view == ViewKind::SubstanceProfile {
            for ident in self.ontology.identifiers_of(&root.entity_id) {
                if ident.scheme.eq_ignore_ascii_case("DCB") {
                    push("attr:dcb".into(), "dcb", &ident.value, None);
                } else {
                    let id = format!("attr:identifier:{}:{}", ident.scheme, ident.value);
                    push(id, "identifier", &ident.value, Some(("scheme", &ident.scheme)));
                }
            }
            for syn in self.ontology.synonyms_of(&root.entity_id) {
                let lang = syn.language.as_deref().unwrap_or("und");
                let id = format!("attr:synonym:{lang}:{}", syn.text);
                push(id, "synonym", &syn.text, Some(("language", lang)));
            }
            return;
        }
        let lineage = self.lineage(root);
        for &key in view.attribute_allowlist() {
            let inherited = || lineage.iter().find_map(|e| e.attr(key)).map(str::to_owned);
            let value = match (view, key) {
                (ViewKind::Prescription, "substance") => {
                    root.attr(key).map(str::to_owned).or_else(|| self.substance_names(&lineage))
                }
                _ => inherited(),
            };
            if let Some(v) = value {
                push(format!("attr:{key}"), key, &v, None);
            }
        }
    }

    fn add_related(
        &self,
        root: &'a CanonicalEntity,
        view: ViewKind,
        root_id: &str,
        nodes: &mut Vec<GraphNode>,
        edges: &mut Vec<GraphEdge>,
    ) {
        let ont = self.ontology;
        let mut relate = |e: &CanonicalEntity, role: &str, extra: Vec<(&str, String)>| {
            let id = format!("entity:{}", e.entity_id);
            let mut n = GraphNode::new(&id, NodeKind::Entity, &e.display_name)
                .with_prop("entity_id", e.entity_id.as_str())
                .with_prop("level", e.level.as_str())
                .with_prop("role", role);
            for (k, v) in extra {
                n = n.with_prop(k, v);
            }
            nodes.push(n);
            edges.push(GraphEdge::new(root_id, EdgeKind::Related, id));
        };
        match view {
            ViewKind::Regulatory => {}
            ViewKind::Prescription => {
                for vmpp in ont.children_of(&root.entity_id) {
                    let mut extra = Vec::new();
                    for key in ["pack_size", "primary_packaging"] {
                        if let Some(v) = vmpp.attr(key) {
                            extra.push((key, v.to_owned()));
                        }
                    }
                    relate(vmpp, "presentation", extra);
                }
            }
            ViewKind::Dispensing => {
                for amp in ont.children_of(&root.entity_id) {
                    for ampp in ont.children_of(&amp.entity_id) {
                        relate(ampp, "trade_product", self.trade_product_props(amp, ampp));
                    }
                }
            }
            ViewKind::SubstanceProfile => {
                for vtm in ont.children_of(&root.entity_id) {
                    relate(vtm, "vtm_mapping", Vec::new());
                    for vmp in ont.children_of(&vtm.entity_id) {
                        relate(vmp, "vmp_mapping", Vec::new());
                    }
                }
            }
        }
    }

    fn trade_product_props(&self, amp: &CanonicalEntity, ampp: &CanonicalEntity) -> Vec<(&'static str, String)> {
        let mut out = vec![("brand", amp.attr("brand").unwrap_or(&amp.display_name).to_owned())];
        if let Some(org) = amp.attr("manufacturer") {
            let name = self.ontology.organization(org).map_or(org, |o| o.name.as_str());
            out.push(("manufacturer", name.to_owned()));
        }
        for key in ["ean", "label", "marketing_status"] {
            if let Some(v) = ampp.attr(key) {
                out.push((key, v.to_owned()));
            }
        }
        out
    }

    fn add_pack(&self, pack: &EvidencePack, root_id: &str, nodes: &mut Vec<GraphNode>, edges: &mut Vec<GraphEdge>) {
        let pid = pack.pack_id.as_str();
        let ty = pack.assertion_type();
        let assertion = format!("assertion:{pid}");
        let ep = format!("qualifier:evidence_pack:{pid}");
        let at = format!("qualifier:assertion_type:{ty}");
        let limits = format!("qualifier:epistemic_limits:{pid}");
        let decision = format!("qualifier:curatorial_decision:{pid}");

        nodes.push(
            GraphNode::new(&assertion, NodeKind::Assertion, &pack.response.assertion)
                .with_prop("assertion_type", ty.as_str())
                .with_prop("focus", pack.focus.as_str())
                .with_prop("illocutionary_class", illocutionary_class(ty).as_str())
                .with_prop("pack_id", pid),
        );
        edges.push(GraphEdge::new(root_id, EdgeKind::Asserts, &assertion));

        let provenance: Vec<String> = pack
            .provenance
            .iter()
            .map(|p| {
                let ids: Vec<&str> = p.node_ids.iter().map(String::as_str).collect();
                format!("{}@{}#{}", p.doc_id, p.version_label, ids.join(","))
            })
            .collect();
        nodes.push(
            GraphNode::qualifier(&ep, QualifierKind::EvidencePack, pid)
                .with_prop("focus", pack.focus.as_str())
                .with_prop("pack_id", pid)
                .with_prop("provenance", provenance)
                .with_prop("question", pack.question.text.as_str()),
        );
        nodes.push(
            GraphNode::qualifier(&at, QualifierKind::AssertionType, ty.as_str())
                .with_prop("illocutionary_class", illocutionary_class(ty).as_str())
                .with_prop("illocutionary_force", illocutionary_force(ty)),
        );
        let l = &pack.limits;
        nodes.push(
            GraphNode::qualifier(&limits, QualifierKind::EpistemicLimits, pid)
                .with_prop("dependencies", l.dependencies.clone())
                .with_prop("divergences", l.divergences.clone())
                .with_prop("gaps", l.gaps.clone())
                .with_prop("silences", l.silences.clone()),
        );
        let s = &pack.status;
        let mut d = GraphNode::qualifier(&decision, QualifierKind::CuratorialDecision, s.state.as_str())
            .with_prop("state", s.state.as_str());
        if let Some(c) = &s.curator {
            d = d.with_prop("curator", c.as_str());
        }
        if let Some(j) = &s.justification {
            d = d.with_prop("justification", j.as_str());
        }
        if let Some(t) = s.decided_at {
            d = d.with_prop("decided_at", t.to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
        }
        nodes.push(d);
        for (kind, to) in [
            (EdgeKind::BackedBy, &ep),
            (EdgeKind::TypedAs, &at),
            (EdgeKind::LimitedBy, &limits),
            (EdgeKind::ValidatedBy, &decision),
        ] {
            edges.push(GraphEdge::new(&assertion, kind, to));
        }

        let mut dimension = |kind: NodeKind, edge: EdgeKind, key: &str, label: &str| {
            let id = format!("{}:{key}", kind_prefix(kind));
            nodes.push(GraphNode::new(&id, kind, label));
            edges.push(GraphEdge::new(&ep, edge, id));
        };
        for entry in &pack.provenance {
            if let Some(doc) = self.documents.get(&entry.doc_id) {
                dimension(NodeKind::Authority, EdgeKind::IssuedBy, &doc.lineage.source, &doc.lineage.source);
            }
        }
        for (conds, edge, polarity) in [
            (&pack.response.validity_conditions, EdgeKind::ValidWhen, "+"),
            (&pack.response.invalidity_conditions, EdgeKind::InvalidWhen, "-"),
        ] {
            for c in conds {
                if let Some(p) = c.strip_prefix(POPULATION_PREFIX) {
                    dimension(NodeKind::Population, EdgeKind::AppliesTo, p.trim(), p.trim());
                } else if let Some(ctx) = c.strip_prefix(CONTEXT_PREFIX) {
                    dimension(NodeKind::ClinicalContext, EdgeKind::DependsOn, ctx.trim(), ctx.trim());
                } else {
                    dimension(NodeKind::Scope, edge, &format!("{polarity}{c}"), c);
                }
            }
        }
        for dep in &l.dependencies {
            dimension(NodeKind::ClinicalContext, EdgeKind::DependsOn, dep, dep);
        }
    }

    /// Every (entity, view) pair the snapshot can materialize, in id order.
    pub fn eligible(&self, views: &[ViewKind]) -> Vec<(EntityId, ViewKind)> {
        let mut out = Vec::new();
        for e in self.ontology.entities() {
            for &v in views {
                if v.level() == e.level {
                    out.push((e.entity_id.clone(), v));
                }
            }
        }
        out
    }
}

fn kind_prefix(kind: NodeKind) -> &'static str {
    match kind {
        NodeKind::Authority => "authority",
        NodeKind::Scope => "scope",
        NodeKind::Population => "population",
        NodeKind::ClinicalContext => "clinical_context",
        NodeKind::Entity => "entity",
        NodeKind::Attribute => "attr",
        NodeKind::Assertion => "assertion",
        NodeKind::Qualifier => "qualifier",
    }
}
