//! Synthetic ontology growth up to an exact number of eligible graphs.
//!
//! One unit is SUB, VTM, 2 VMP, 4 VMPP, 4 AMP and 8 AMPP: 15 graphs.
//! The remainder is made up with extra AMPPs under the last AMP.

use serde::{Deserialize, Serialize};

use super::ontology::ean_with_check;
use super::ids;
use crate::error::{Error, Result};
use crate::ontology::{CanonicalEntity, CanonicalLevel, EntityId, Ontology, OntologyRecord, OntologyStore};
use crate::refraction::ViewKind;

pub const GRAPHS_PER_UNIT: usize = 15;
const BASE: u64 = 500_000_000;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticReport {
    pub graphs_before: usize,
    pub graphs_after: usize,
    pub units: usize,
    pub extra_presentations: usize,
    pub entities_added: usize,
}

pub fn eligible_graphs(ontology: &Ontology) -> usize {
    ontology
        .entities_per_level()
        .iter()
        .map(|(level, n)| n * ViewKind::for_level(*level).len())
        .sum()
}

struct Ids(u64);

impl Ids {
    fn next(&mut self, level: CanonicalLevel) -> String {
        self.0 += 1;
        EntityId::new(level, BASE + self.0).0
    }
}

fn presentation(id: String, amp: &str, n: u64) -> CanonicalEntity {
    CanonicalEntity::new(id, CanonicalLevel::Ampp, format!("synthetic presentation {n}"))
        .with_parent(amp)
        .with_attr("ean", ean_with_check(&format!("77{n:010}")))
        .with_attr("label", "prescription only")
        .with_attr("storage", "15-30 °C")
        .with_attr("marketing_status", "marketed")
}

/// Adds synthetic entities until `target` graphs are eligible across all views.
pub fn extend_to_graph_count(store: &OntologyStore, target: usize) -> Result<SyntheticReport> {
    use CanonicalLevel::*;
    let (before, fallback_amp, issued) = {
        let ont = store.read();
        let amp = ont.entities().find(|e| e.level == Amp).map(|e| e.entity_id.0.clone());
        let issued = ont
            .entities()
            .filter_map(|e| e.entity_id.as_str().rsplit('-').next()?.parse::<u64>().ok())
            .filter(|n| *n > BASE)
            .max()
            .map_or(0, |n| n - BASE);
        (eligible_graphs(&ont), amp, issued)
    };
    if target < before {
        return Err(Error::InvalidInput(format!("corpus already has {before} graphs, more than {target}")));
    }
    let deficit = target - before;
    let (units, extra) = (deficit / GRAPHS_PER_UNIT, deficit % GRAPHS_PER_UNIT);

    let mut ids = Ids(issued);
    let mut recs: Vec<CanonicalEntity> = Vec::with_capacity(units * 20 + extra);
    let mut last_amp = fallback_amp;
    for u in 0..units {
        let sub = ids.next(Substance);
        recs.push(CanonicalEntity::new(&sub, Substance, format!("synthetic substance {u}")));
        let vtm = ids.next(Vtm);
        recs.push(CanonicalEntity::new(&vtm, Vtm, format!("synthetic moiety {u}")).with_parent(&sub));
        for f in 0..2 {
            let vmp = ids.next(Vmp);
            recs.push(
                CanonicalEntity::new(&vmp, Vmp, format!("synthetic formulation {u}.{f}"))
                    .with_parent(&vtm)
                    .with_attr("atc", "N02BB01")
                    .with_attr("concentration", "100 mg")
                    .with_attr("pharmaceutical_form", "tablet"),
            );
            for p in 0..2 {
                let vmpp = ids.next(Vmpp);
                recs.push(
                    CanonicalEntity::new(&vmpp, Vmpp, format!("synthetic pack {u}.{f}.{p}"))
                        .with_parent(&vmp)
                        .with_attr("prescribable_unit", "tablet")
                        .with_attr("pack_size", ["10", "20"][p]),
                );
                let amp = ids.next(Amp);
                recs.push(
                    CanonicalEntity::new(&amp, Amp, format!("synthetic product {u}.{f}.{p}"))
                        .with_parent(&vmpp)
                        .with_attr("manufacturer", ids::SANOFI)
                        .with_attr("registration", format!("SYN {u}.{f}.{p}")),
                );
                for _ in 0..2 {
                    let id = ids.next(Ampp);
                    recs.push(presentation(id, &amp, ids.0));
                }
                last_amp = Some(amp);
            }
        }
    }
    if extra > 0 {
        let amp = last_amp.ok_or_else(|| Error::InvalidInput("no AMP to attach extra presentations to".into()))?;
        for _ in 0..extra {
            let id = ids.next(Ampp);
            recs.push(presentation(id, &amp, ids.0));
        }
    }
    let added = recs.len();
    store.load_records(recs.into_iter().map(OntologyRecord::Entity).collect(), &|_| false)?;
    let after = eligible_graphs(&store.read());
    Ok(SyntheticReport {
        graphs_before: before,
        graphs_after: after,
        units,
        extra_presentations: extra,
        entities_added: added,
    })
}
