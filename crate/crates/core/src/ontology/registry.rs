use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::types::*;
use super::OntologyError;
use crate::lector::{EvidencePack, PackId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Ascend,
    Descend,
}

/// One node of a hierarchy walk; `children` follow the walk direction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HierarchyNode {
    pub entity_id: EntityId,
    pub level: CanonicalLevel,
    pub display_name: String,
    pub children: Vec<HierarchyNode>,
}

impl HierarchyNode {
    /// Distinct entity ids reached by the walk.
    pub fn entity_ids(&self) -> BTreeSet<EntityId> {
        let mut out = BTreeSet::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut BTreeSet<EntityId>) {
        out.insert(self.entity_id.clone());
        for c in &self.children {
            c.collect(out);
        }
    }

    /// Nodes with no further children in the walk direction.
    pub fn leaves(&self) -> BTreeSet<EntityId> {
        if self.children.is_empty() {
            return BTreeSet::from([self.entity_id.clone()]);
        }
        self.children.iter().flat_map(|c| c.leaves()).collect()
    }
}

fn ean13_valid(s: &str) -> bool {
    if s.len() != 13 || !s.bytes().all(|b| b.is_ascii_digit()) {
        return false;
    }
    let d: Vec<u32> = s.bytes().map(|b| (b - b'0') as u32).collect();
    let sum: u32 = d[..12].iter().enumerate().map(|(i, x)| if i % 2 == 0 { *x } else { x * 3 }).sum();
    (10 - sum % 10) % 10 == d[12]
}

/// Level placement and format of the attributes the views rely on.
fn check_core_attributes(e: &CanonicalEntity) -> Result<(), OntologyError> {
    use CanonicalLevel::*;
    let placement: [(&str, CanonicalLevel); 5] =
        [("atc", Vmp), ("ddd", Vmp), ("ean", Ampp), ("label", Ampp), ("registration", Amp)];
    for (key, level) in placement {
        if e.attributes.contains_key(key) && e.level != level {
            return Err(OntologyError::InvalidAttribute {
                key: key.into(),
                reason: format!("belongs on {level}, not {}", e.level),
            });
        }
    }
    if let Some(atc) = e.attr("atc") {
        let b = atc.as_bytes();
        let ok = b.len() == 7
            && b[0].is_ascii_uppercase()
            && b[1..3].iter().all(u8::is_ascii_digit)
            && b[3..5].iter().all(u8::is_ascii_uppercase)
            && b[5..7].iter().all(u8::is_ascii_digit);
        if !ok {
            return Err(OntologyError::InvalidAttribute { key: "atc".into(), reason: format!("{atc:?}") });
        }
    }
    if let Some(ean) = e.attr("ean") {
        if !ean13_valid(ean) {
            return Err(OntologyError::InvalidAttribute { key: "ean".into(), reason: format!("{ean:?}") });
        }
    }
    Ok(())
}

/// In-memory canonical hierarchy: a level-ordered DAG plus identifiers,
/// synonyms, organizations and evidence links.
#[derive(Debug, Clone, Default)]
pub struct Ontology {
    entities: BTreeMap<EntityId, CanonicalEntity>,
    children: HashMap<EntityId, BTreeSet<EntityId>>,
    identifiers: BTreeMap<(String, String), BTreeSet<EntityId>>,
    identifiers_by_entity: HashMap<EntityId, BTreeSet<(String, String)>>,
    synonyms: BTreeSet<Synonym>,
    organizations: BTreeMap<String, Organization>,
    links: BTreeMap<String, CanonicalLink>,
    links_by_entity: HashMap<EntityId, BTreeSet<String>>,
    links_by_pack: HashMap<PackId, BTreeSet<String>>,
}

impl Ontology {
    pub fn new() -> Self {
        Self::default()
    }

    /// Validates an entity against the registry without storing it.
    pub fn check_entity(&self, e: &CanonicalEntity) -> Result<(), OntologyError> {
        if e.entity_id.level() != Some(e.level) {
            return Err(OntologyError::LevelMismatch {
                entity_id: e.entity_id.clone(),
                level: e.level,
            });
        }
        if let Some(existing) = self.entities.get(&e.entity_id) {
            if existing.level != e.level {
                return Err(OntologyError::LevelMismatch { entity_id: e.entity_id.clone(), level: e.level });
            }
        }
        for p in &e.parent_ids {
            let parent = self.entities.get(p).ok_or_else(|| OntologyError::UnknownParent(p.clone()))?;
            if Some(parent.level) != e.level.parent() {
                return Err(OntologyError::IllegalParentLevel {
                    child: e.level,
                    parent: parent.level,
                });
            }
        }
        if e.level == CanonicalLevel::Substance && !e.parent_ids.is_empty() {
            return Err(OntologyError::IllegalParentLevel { child: e.level, parent: e.level });
        }
        check_core_attributes(e)
    }

    /// Inserts or merges. Updates keep id and level, merge attributes and add parents.
    pub fn upsert_entity(&mut self, entity: CanonicalEntity) -> Result<EntityId, OntologyError> {
        self.check_entity(&entity)?;
        let id = entity.entity_id.clone();
        for p in &entity.parent_ids {
            self.children.entry(p.clone()).or_default().insert(id.clone());
        }
        match self.entities.get_mut(&id) {
            Some(existing) => {
                existing.display_name = entity.display_name;
                existing.attributes.extend(entity.attributes);
                for p in entity.parent_ids {
                    if !existing.parent_ids.contains(&p) {
                        existing.parent_ids.push(p);
                    }
                }
                check_core_attributes(existing)?;
            }
            None => {
                self.entities.insert(id.clone(), entity);
            }
        }
        Ok(id)
    }

    pub fn add_identifier(&mut self, ident: ExternalIdentifier) -> Result<(), OntologyError> {
        if !self.entities.contains_key(&ident.entity_id) {
            return Err(OntologyError::UnknownEntity(ident.entity_id));
        }
        let key = (ident.scheme.clone(), ident.value.clone());
        let holders = self.identifiers.entry(key).or_default();
        if holders.iter().any(|h| *h != ident.entity_id) {
            return Err(OntologyError::IdentifierConflict { scheme: ident.scheme, value: ident.value });
        }
        self.identifiers_by_entity
            .entry(ident.entity_id.clone())
            .or_default()
            .insert((ident.scheme, ident.value));
        holders.insert(ident.entity_id);
        Ok(())
    }

    pub fn add_synonym(&mut self, syn: Synonym) -> Result<(), OntologyError> {
        if !self.entities.contains_key(&syn.entity_id) {
            return Err(OntologyError::UnknownEntity(syn.entity_id));
        }
        if syn.text.trim().is_empty() {
            return Err(OntologyError::InvalidAttribute { key: "synonym".into(), reason: "empty text".into() });
        }
        self.synonyms.insert(syn);
        Ok(())
    }

    pub fn upsert_organization(&mut self, org: Organization) {
        self.organizations.insert(org.org_id.clone(), org);
    }

    pub fn resolve_identifier(&self, scheme: &str, value: &str) -> Result<&CanonicalEntity, OntologyError> {
        let holders = self
            .identifiers
            .get(&(scheme.to_owned(), value.to_owned()))
            .filter(|h| !h.is_empty())
            .ok_or_else(|| OntologyError::NotFound { scheme: scheme.into(), value: value.into() })?;
        if holders.len() > 1 {
            return Err(OntologyError::AmbiguousIdentifier { scheme: scheme.into(), value: value.into() });
        }
        let id = holders.iter().next().expect("non-empty");
        Ok(&self.entities[id])
    }

    pub fn get(&self, id: &EntityId) -> Result<&CanonicalEntity, OntologyError> {
        self.entities.get(id).ok_or_else(|| OntologyError::UnknownEntity(id.clone()))
    }

    pub fn contains(&self, id: &EntityId) -> bool {
        self.entities.contains_key(id)
    }

    pub fn entities(&self) -> impl Iterator<Item = &CanonicalEntity> {
        self.entities.values()
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn children_of(&self, id: &EntityId) -> impl Iterator<Item = &CanonicalEntity> {
        self.children.get(id).into_iter().flatten().map(|c| &self.entities[c])
    }

    pub fn parents_of<'a>(&'a self, e: &'a CanonicalEntity) -> impl Iterator<Item = &'a CanonicalEntity> {
        e.parent_ids.iter().map(|p| &self.entities[p])
    }

    pub fn identifiers_of(&self, id: &EntityId) -> Vec<ExternalIdentifier> {
        self.identifiers_by_entity
            .get(id)
            .into_iter()
            .flatten()
            .map(|(scheme, value)| ExternalIdentifier {
                scheme: scheme.clone(),
                value: value.clone(),
                entity_id: id.clone(),
            })
            .collect()
    }

    pub fn synonyms_of(&self, id: &EntityId) -> Vec<&Synonym> {
        let start = Synonym { entity_id: id.clone(), text: String::new(), language: None };
        self.synonyms.range(start..).take_while(|s| &s.entity_id == id).collect()
    }

    pub fn organization(&self, org_id: &str) -> Option<&Organization> {
        self.organizations.get(org_id)
    }

    pub fn hierarchy_walk(&self, id: &EntityId, direction: Direction) -> Result<HierarchyNode, OntologyError> {
        let root = self.get(id)?;
        Ok(self.walk(root, direction))
    }

    fn walk(&self, e: &CanonicalEntity, direction: Direction) -> HierarchyNode {
        let next: Vec<&CanonicalEntity> = match direction {
            Direction::Descend => self.children_of(&e.entity_id).collect(),
            Direction::Ascend => self.parents_of(e).collect(),
        };
        HierarchyNode {
            entity_id: e.entity_id.clone(),
            level: e.level,
            display_name: e.display_name.clone(),
            children: next.into_iter().map(|n| self.walk(n, direction)).collect(),
        }
    }

    /// Transitive closure without building the tree.
    pub fn closure(&self, id: &EntityId, direction: Direction) -> BTreeSet<EntityId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![id.clone()];
        while let Some(cur) = stack.pop() {
            let Some(e) = self.entities.get(&cur) else { continue };
            let next: Vec<EntityId> = match direction {
                Direction::Descend => self.children.get(&cur).into_iter().flatten().cloned().collect(),
                Direction::Ascend => e.parent_ids.clone(),
            };
            for n in next {
                if seen.insert(n.clone()) {
                    stack.push(n);
                }
            }
        }
        seen
    }

    pub fn link_evidence(
        &mut self,
        pack: &EvidencePack,
        entity_id: &EntityId,
        created_at: DateTime<Utc>,
    ) -> Result<CanonicalLink, OntologyError> {
        if !pack.is_accepted() {
            return Err(OntologyError::PackNotAccepted(pack.pack_id.clone()));
        }
        self.get(entity_id)?;
        if self.links_between(&pack.pack_id, entity_id) {
            return Err(OntologyError::DuplicateLink {
                pack_id: pack.pack_id.clone(),
                entity_id: entity_id.clone(),
            });
        }
        let link = CanonicalLink {
            link_id: format!("CL-{:06}", self.links.len() + 1),
            pack_id: pack.pack_id.clone(),
            entity_id: entity_id.clone(),
            created_at,
        };
        self.insert_link(link.clone());
        Ok(link)
    }

    fn links_between(&self, pack_id: &PackId, entity_id: &EntityId) -> bool {
        self.links_by_pack
            .get(pack_id)
            .is_some_and(|ids| ids.iter().any(|l| &self.links[l].entity_id == entity_id))
    }

    pub(super) fn insert_link(&mut self, link: CanonicalLink) {
        self.links_by_entity.entry(link.entity_id.clone()).or_default().insert(link.link_id.clone());
        self.links_by_pack.entry(link.pack_id.clone()).or_default().insert(link.link_id.clone());
        self.links.insert(link.link_id.clone(), link);
    }

    pub(super) fn check_link(&self, link: &CanonicalLink) -> Result<(), OntologyError> {
        self.get(&link.entity_id)?;
        if self.links.contains_key(&link.link_id) || self.links_between(&link.pack_id, &link.entity_id) {
            return Err(OntologyError::DuplicateLink {
                pack_id: link.pack_id.clone(),
                entity_id: link.entity_id.clone(),
            });
        }
        Ok(())
    }

    pub fn links(&self) -> impl Iterator<Item = &CanonicalLink> {
        self.links.values()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn links_for_entity(&self, id: &EntityId) -> Vec<&CanonicalLink> {
        self.links_by_entity.get(id).into_iter().flatten().map(|l| &self.links[l]).collect()
    }

    pub fn links_for_pack(&self, id: &PackId) -> Vec<&CanonicalLink> {
        self.links_by_pack.get(id).into_iter().flatten().map(|l| &self.links[l]).collect()
    }

    pub fn entities_per_level(&self) -> BTreeMap<CanonicalLevel, usize> {
        let mut out: BTreeMap<CanonicalLevel, usize> = CanonicalLevel::ALL.iter().map(|&l| (l, 0)).collect();
        for e in self.entities.values() {
            *out.entry(e.level).or_default() += 1;
        }
        out
    }

    pub fn organizations(&self) -> impl Iterator<Item = &Organization> {
        self.organizations.values()
    }

    pub fn all_identifiers(&self) -> Vec<ExternalIdentifier> {
        self.identifiers
            .iter()
            .flat_map(|((scheme, value), holders)| {
                holders.iter().map(move |h| ExternalIdentifier {
                    scheme: scheme.clone(),
                    value: value.clone(),
                    entity_id: h.clone(),
                })
            })
            .collect()
    }

    pub fn all_synonyms(&self) -> impl Iterator<Item = &Synonym> {
        self.synonyms.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lector::*;

    fn chain() -> Ontology {
        let mut o = Ontology::new();
        o.upsert_entity(CanonicalEntity::new("SUB-000033943", CanonicalLevel::Substance, "dipyrone monohydrate"))
            .unwrap();
        o.upsert_entity(
            CanonicalEntity::new("VTM-000010750", CanonicalLevel::Vtm, "dipyrone monohydrate").with_parent("SUB-000033943"),
        )
        .unwrap();
        o.upsert_entity(
            CanonicalEntity::new("VMP-000051605", CanonicalLevel::Vmp, "dipyrone monohydrate 500 mg tablet")
                .with_parent("VTM-000010750")
                .with_attr("atc", "N02BB02")
                .with_attr("ddd", "0.167"),
        )
        .unwrap();
        o.upsert_entity(
            CanonicalEntity::new("VMPP-000103766", CanonicalLevel::Vmpp, "dipyrone 500 mg x 30 tablets")
                .with_parent("VMP-000051605"),
        )
        .unwrap();
        o.upsert_entity(
            CanonicalEntity::new("AMP-000200001", CanonicalLevel::Amp, "NOVALGINA 500 mg")
                .with_parent("VMPP-000103766")
                .with_attr("registration", "PMA 183260351"),
        )
        .unwrap();
        o.upsert_entity(
            CanonicalEntity::new("AMPP-000300001", CanonicalLevel::Ampp, "NOVALGINA 500 mg box x 30")
                .with_parent("AMP-000200001")
                .with_attr("ean", "7891058008635"),
        )
        .unwrap();
        o.add_identifier(ExternalIdentifier {
            scheme: "CAS".into(),
            value: "5907-38-0".into(),
            entity_id: "SUB-000033943".into(),
        })
        .unwrap();
        o.add_identifier(ExternalIdentifier {
            scheme: "EAN".into(),
            value: "7891058008635".into(),
            entity_id: "AMPP-000300001".into(),
        })
        .unwrap();
        o
    }

    #[test]
    fn parent_level_rules() {
        let mut o = chain();
        let bad = CanonicalEntity::new("AMPP-000300002", CanonicalLevel::Ampp, "x").with_parent("SUB-000033943");
        assert!(matches!(o.upsert_entity(bad), Err(OntologyError::IllegalParentLevel { .. })));
        let orphan = CanonicalEntity::new("VMP-000000001", CanonicalLevel::Vmp, "x").with_parent("VTM-999999999");
        assert!(matches!(o.upsert_entity(orphan), Err(OntologyError::UnknownParent(_))));
        let mismatched = CanonicalEntity::new("VMP-000000002", CanonicalLevel::Vtm, "x");
        assert!(matches!(o.upsert_entity(mismatched), Err(OntologyError::LevelMismatch { .. })));
    }

    #[test]
    fn reupsert_merges_attributes() {
        let mut o = chain();
        let id = o
            .upsert_entity(
                CanonicalEntity::new("VMP-000051605", CanonicalLevel::Vmp, "dipyrone monohydrate 500 mg tablet")
                    .with_attr("concentration", "500 mg"),
            )
            .unwrap();
        let e = o.get(&id).unwrap();
        assert_eq!(e.attr("atc"), Some("N02BB02"));
        assert_eq!(e.attr("concentration"), Some("500 mg"));
        assert_eq!(e.parent_ids, vec![EntityId::from("VTM-000010750")]);
    }

    #[test]
    fn core_attribute_validation() {
        let mut o = chain();
        let wrong_level = CanonicalEntity::new("VTM-000000009", CanonicalLevel::Vtm, "x")
            .with_parent("SUB-000033943")
            .with_attr("atc", "N02BB02");
        assert!(matches!(o.upsert_entity(wrong_level), Err(OntologyError::InvalidAttribute { .. })));
        let bad_ean = CanonicalEntity::new("AMPP-000300009", CanonicalLevel::Ampp, "x")
            .with_parent("AMP-000200001")
            .with_attr("ean", "7891058008636");
        assert!(matches!(o.upsert_entity(bad_ean), Err(OntologyError::InvalidAttribute { .. })));
        assert!(ean13_valid("7891058008635"));
    }

    #[test]
    fn resolve() {
        let o = chain();
        assert_eq!(o.resolve_identifier("CAS", "5907-38-0").unwrap().entity_id.as_str(), "SUB-000033943");
        assert_eq!(o.resolve_identifier("EAN", "7891058008635").unwrap().level, CanonicalLevel::Ampp);
        assert!(matches!(o.resolve_identifier("CAS", "0-00-0"), Err(OntologyError::NotFound { .. })));
    }

    #[test]
    fn identifier_uniqueness() {
        let mut o = chain();
        let clash = ExternalIdentifier {
            scheme: "CAS".into(),
            value: "5907-38-0".into(),
            entity_id: "VTM-000010750".into(),
        };
        assert!(matches!(o.add_identifier(clash), Err(OntologyError::IdentifierConflict { .. })));
    }

    #[test]
    fn walks() {
        let o = chain();
        let down = o.hierarchy_walk(&"SUB-000033943".into(), Direction::Descend).unwrap();
        assert_eq!(down.entity_ids().len(), 6);
        let up = o.hierarchy_walk(&"AMPP-000300001".into(), Direction::Ascend).unwrap();
        let mut node = &up;
        let mut levels = vec![node.level];
        while let Some(c) = node.children.first() {
            assert_eq!(node.children.len(), 1);
            node = c;
            levels.push(node.level);
        }
        assert_eq!(levels.len(), 6);
        assert_eq!(levels.first(), Some(&CanonicalLevel::Ampp));
        assert_eq!(levels.last(), Some(&CanonicalLevel::Substance));
        let leaf = o.hierarchy_walk(&"AMPP-000300001".into(), Direction::Descend).unwrap();
        assert!(leaf.children.is_empty());
        assert!(matches!(
            o.hierarchy_walk(&"VMP-404".into(), Direction::Descend),
            Err(OntologyError::UnknownEntity(_))
        ));
    }

    fn pack(state: PackState) -> EvidencePack {
        EvidencePack {
            pack_id: "EP-001".into(),
            question: QualifiedQuestion { text: "q".into(), assertion_type: AssertionType::Indication },
            response: GroundedResponse {
                assertion: "a".into(),
                validity_conditions: vec![],
                invalidity_conditions: vec![],
            },
            provenance: vec![],
            limits: EpistemicLimits::default(),
            status: CuratorialStatus { state, curator: Some("c".into()), justification: Some("j".into()), decided_at: None },
            focus: "f".into(),
            derived_from: None,
            created_at: Utc::now(),
        }
    }

    #[test]
    fn link_gating() {
        let mut o = chain();
        let vmp = EntityId::from("VMP-000051605");
        assert!(matches!(
            o.link_evidence(&pack(PackState::Draft), &vmp, Utc::now()),
            Err(OntologyError::PackNotAccepted(_))
        ));
        let l = o.link_evidence(&pack(PackState::Accepted), &vmp, Utc::now()).unwrap();
        assert_eq!(l.link_id, "CL-000001");
        assert!(matches!(
            o.link_evidence(&pack(PackState::Accepted), &vmp, Utc::now()),
            Err(OntologyError::DuplicateLink { .. })
        ));
        assert!(matches!(
            o.link_evidence(&pack(PackState::Accepted), &"VMP-404".into(), Utc::now()),
            Err(OntologyError::UnknownEntity(_))
        ));
        assert_eq!(o.links_for_entity(&vmp).len(), 1);
        assert_eq!(o.links_for_pack(&"EP-001".into()).len(), 1);
    }
}
