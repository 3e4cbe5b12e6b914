use std::collections::{BTreeSet, HashMap};

use chrono::NaiveDate;
use plp_core::canonical::sha256_hex;
use plp_core::lector::{
    validate_well_formed, AssertionType, ChecksumLookup, CuratorialStatus, GroundedResponse, PackInput, PackState,
    ProvenanceChainEntry, UncheckedLimits, UncheckedPack, UncheckedQuestion, ValidationReport,
};
use plp_core::patos::{DocId, DocKind, LineageKey, NewDocument, PatosStore};
use proptest::prelude::*;

const DOCS: usize = 8;

struct Catalogue(HashMap<(DocId, String), String>);

impl Catalogue {
    fn new() -> Self {
        Self(
            (0..DOCS)
                .map(|i| ((doc(i), format!("v{i}")), sha256_hex(format!("document {i}").as_bytes())))
                .collect(),
        )
    }
}

impl ChecksumLookup for Catalogue {
    fn recorded_checksum(&self, doc_id: &DocId, version_label: &str) -> Option<String> {
        self.0.get(&(doc_id.clone(), version_label.to_owned())).cloned()
    }
}

fn doc(i: usize) -> DocId {
    DocId(format!("doc-{i:02}"))
}

fn entry(cat: &Catalogue, i: usize, nodes: BTreeSet<String>) -> ProvenanceChainEntry {
    let version_label = format!("v{i}");
    let checksum = cat.0[&(doc(i), version_label.clone())].clone();
    ProvenanceChainEntry { doc_id: doc(i), version_label, checksum, node_ids: nodes }
}

fn words() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec("[a-z]{3,10}( [a-z]{3,10}){0,3}", 0..3)
}

fn status() -> impl Strategy<Value = CuratorialStatus> {
    prop_oneof![
        Just(CuratorialStatus::draft()),
        Just(CuratorialStatus { state: PackState::UnderReview, ..CuratorialStatus::draft() }),
        ("[a-z]{4,8}\\.[0-9]{2}", "[A-Za-z ]{5,40}", any::<bool>()).prop_map(|(curator, why, accept)| {
            CuratorialStatus {
                state: if accept { PackState::Accepted } else { PackState::Rejected },
                curator: Some(curator),
                justification: Some(format!("J {why}")),
                decided_at: None,
            }
        }),
    ]
}

prop_compose! {
    fn well_formed_pack()(
        ty in prop::sample::select(AssertionType::ALL.to_vec()),
        question in "[A-Za-z ]{5,60}\\?",
        assertion in "[A-Za-z ]{5,80}",
        cites in prop::collection::btree_map(
            0..DOCS,
            prop::collection::btree_set("[1-9](\\.[1-9]){0,2}", 1..4),
            1..4,
        ),
        limits in (words(), words(), words(), words()),
        valid in words(),
        invalid in words(),
        status in status(),
    ) -> UncheckedPack {
        let cat = Catalogue::new();
        UncheckedPack {
            pack_id: None,
            body: PackInput {
                question: UncheckedQuestion { text: question, assertion_type: ty.as_str().to_owned() },
                response: GroundedResponse { assertion, validity_conditions: valid, invalidity_conditions: invalid },
                provenance: cites.into_iter().map(|(i, nodes)| entry(&cat, i, nodes)).collect(),
                limits: Some(UncheckedLimits {
                    divergences: Some(limits.0),
                    gaps: Some(limits.1),
                    dependencies: Some(limits.2),
                    silences: Some(limits.3),
                }),
                focus: "dipyrone monohydrate 500 mg tablet".into(),
            },
            status,
            derived_from: None,
            created_at: None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Mutation {
    UntypedQuestion,
    NoProvenance,
    WrongChecksum,
    EmptyNodeList,
    MissingLimitList,
    UnjustifiedTerminal,
}

const MUTATIONS: [(Mutation, u8); 6] = [
    (Mutation::UntypedQuestion, 1),
    (Mutation::NoProvenance, 2),
    (Mutation::WrongChecksum, 3),
    (Mutation::EmptyNodeList, 4),
    (Mutation::MissingLimitList, 5),
    (Mutation::UnjustifiedTerminal, 6),
];

fn mutate(pack: &UncheckedPack, m: Mutation, pick: usize) -> UncheckedPack {
    let mut p = pack.clone();
    let n = p.body.provenance.len();
    match m {
        Mutation::UntypedQuestion => {
            let bad = ["", "indication", "OFF_LABEL", "INDICATION ", "Dosing"];
            p.body.question.assertion_type = bad[pick % bad.len()].to_owned();
        }
        Mutation::NoProvenance => p.body.provenance.clear(),
        Mutation::WrongChecksum => {
            let e = &mut p.body.provenance[pick % n];
            match pick % 3 {
                0 => e.checksum = sha256_hex(e.checksum.as_bytes()),
                1 => e.checksum = "not-a-digest".into(),
                _ => e.version_label.push_str("-other"),
            }
        }
        Mutation::EmptyNodeList => p.body.provenance[pick % n].node_ids.clear(),
        Mutation::MissingLimitList => {
            let l = p.body.limits.as_mut().unwrap();
            match pick % 5 {
                0 => l.divergences = None,
                1 => l.gaps = None,
                2 => l.dependencies = None,
                3 => l.silences = None,
                _ => p.body.limits = None,
            }
        }
        Mutation::UnjustifiedTerminal => {
            let s = &mut p.status;
            s.state = if pick % 2 == 0 { PackState::Accepted } else { PackState::Rejected };
            s.curator = Some("curator.pharm.01".into());
            s.justification = Some("Matches the cited section".into());
            match pick % 4 {
                0 => s.justification = None,
                1 => s.justification = Some("   ".into()),
                2 => s.curator = None,
                _ => s.curator = Some(String::new()),
            }
        }
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn each_mutation_names_exactly_its_condition(pack in well_formed_pack(), pick in 0usize..64) {
        let cat = Catalogue::new();
        let base = validate_well_formed(&pack, Some(&cat));
        prop_assert!(base.well_formed, "{base:?}");
        prop_assert!(base.violations.is_empty());
        for (m, condition) in MUTATIONS {
            let report = validate_well_formed(&mutate(&pack, m, pick), Some(&cat));
            prop_assert_eq!(&report.violations, &BTreeSet::from([condition]), "{:?}", m);
            prop_assert!(!report.well_formed);
        }
    }

    #[test]
    fn serialized_round_trip_keeps_the_verdict(pack in well_formed_pack()) {
        let cat = Catalogue::new();
        let json = serde_json::to_string(&pack).unwrap();
        let back: UncheckedPack = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(validate_well_formed(&back, Some(&cat)), validate_well_formed(&pack, Some(&cat)));
    }
}

#[test]
fn without_a_store_integrity_is_unverifiable_not_violated() {
    let cat = Catalogue::new();
    let pack = UncheckedPack {
        pack_id: None,
        body: PackInput {
            question: UncheckedQuestion { text: "Is it indicated for fever?".into(), assertion_type: "INDICATION".into() },
            response: GroundedResponse {
                assertion: "Indicated for fever".into(),
                validity_conditions: vec![],
                invalidity_conditions: vec![],
            },
            provenance: vec![entry(&cat, 0, BTreeSet::from(["1.1".to_owned()]))],
            limits: Some(UncheckedLimits::from(plp_core::lector::EpistemicLimits::default())),
            focus: "dipyrone".into(),
        },
        status: CuratorialStatus::draft(),
        derived_from: None,
        created_at: None,
    };
    let r = validate_well_formed(&pack, None);
    assert_eq!(
        r,
        ValidationReport { violations: BTreeSet::new(), unverifiable: BTreeSet::from([3]), well_formed: false }
    );
}

#[test]
fn document_store_serves_as_checksum_lookup() {
    let dir = tempfile::tempdir().unwrap();
    let store = PatosStore::open(dir.path(), plp_core::clock::Clock::System).unwrap();
    let doc = store
        .ingest_document(
            b"%PDF-1.4 insert",
            NewDocument {
                lineage: LineageKey::new("ANVISA", "186200018", DocKind::ProfessionalInsert, "novalgina"),
                version_label: "20260116".into(),
                format: "PDF".into(),
                capture_date: NaiveDate::from_ymd_opt(2026, 1, 28).unwrap(),
                active_ingredient: None,
            },
        )
        .unwrap();
    assert_eq!(store.recorded_checksum(&doc.doc_id, "20260116"), Some(doc.checksum.clone()));
    assert_eq!(store.recorded_checksum(&doc.doc_id, "20240215"), None);
    assert_eq!(store.recorded_checksum(&DocId("nope".into()), "20260116"), None);
}
