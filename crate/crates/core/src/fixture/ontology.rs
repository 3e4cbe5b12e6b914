//! Canonical records for the dipyrone chain: one substance, 16 VTMs,
//! 36 VMPs and 92 trade presentations of the 500 mg tablet.

use crate::ontology::{
    CanonicalEntity, CanonicalLevel, EntityId, ExternalIdentifier, OntologyRecord, OrgRole, Organization, Synonym,
};

use super::ids;

pub const PARTNERS: [&str; 15] = [
    "caffeine",
    "orphenadrine citrate",
    "scopolamine butylbromide",
    "isometheptene mucate",
    "adiphenine hydrochloride",
    "promethazine hydrochloride",
    "pitofenone hydrochloride",
    "fenpiverinium bromide",
    "homatropine methylbromide",
    "papaverine hydrochloride",
    "ascorbic acid",
    "chlorphenamine maleate",
    "hyoscine methobromide",
    "thiamine hydrochloride",
    "pyridoxine hydrochloride",
];

/// (name, concentration, form, form taxonomy) for the single-substance formulations.
pub const FORMULATIONS: [(&str, &str, &str, &str); 7] = [
    ("tablet", "500 mg", "tablet (PDF-000002766)", "oral / solid / ingestion / conventional release"),
    ("tablet", "1 g", "tablet", "oral / solid / ingestion / conventional release"),
    ("oral solution", "500 mg/mL", "oral solution", "oral / liquid / ingestion / conventional release"),
    ("oral suspension", "50 mg/mL", "oral suspension", "oral / liquid / ingestion / conventional release"),
    ("solution for injection", "500 mg/mL", "solution for injection", "parenteral / liquid / injection / conventional release"),
    ("suppository", "1 g", "suppository", "rectal / solid / insertion / conventional release"),
    ("effervescent tablet", "500 mg", "effervescent tablet", "oral / solid / dissolution / conventional release"),
];

pub const PACK_SIZES: [u32; 13] = [30, 10, 20, 50, 100, 4, 6, 8, 12, 16, 24, 40, 60];

/// Trade presentations per pack size, aligned with `PACK_SIZES`.
pub const TRADE_PER_PACK: [usize; 13] = [17, 7, 7, 7, 6, 6, 6, 6, 6, 6, 6, 6, 6];

pub const MANUFACTURERS: usize = 24;

pub const INTERNATIONAL_SCHEMES: [&str; 15] = [
    "ChEMBL", "DrugBank", "PubChem CID", "MeSH", "ChEBI", "KEGG", "RxNorm", "SNOMED CT", "EC", "InChIKey", "HMDB",
    "Wikidata", "NCIt", "DSSTox", "EudraVigilance",
];

pub const SYNONYMS: [(&str, &str); 24] = [
    ("dipyrone", "en"),
    ("dipyrone monohydrate", "en"),
    ("metamizole", "en"),
    ("metamizole sodium", "en"),
    ("methampyrone", "en"),
    ("noramidopyrine methanesulfonate", "en"),
    ("dipirona", "pt"),
    ("dipirona monoidratada", "pt"),
    ("dipirona sódica", "pt"),
    ("metamizol", "es"),
    ("metamizol sódico", "es"),
    ("métamizole", "fr"),
    ("métamizole sodique", "fr"),
    ("Metamizol-Natrium", "de"),
    ("Novaminsulfon", "de"),
    ("metamizolo", "it"),
    ("metamizolo sodico", "it"),
    ("analgin", "ru"),
    ("metamizolum natricum", "la"),
    ("analginum", "la"),
    ("sulpyrine", "ja"),
    ("metamizol sodowy", "pl"),
    ("metamizool", "nl"),
    ("metamizol natrium", "sv"),
];

pub fn ean_with_check(twelve: &str) -> String {
    let sum: u32 = twelve
        .bytes()
        .enumerate()
        .map(|(i, b)| {
            let d = (b - b'0') as u32;
            if i % 2 == 0 {
                d
            } else {
                d * 3
            }
        })
        .sum();
    format!("{twelve}{}", (10 - sum % 10) % 10)
}

fn fixture_id(level: CanonicalLevel, n: u64) -> String {
    EntityId::new(level, 900_000_000 + n).0
}

pub fn org_id(n: usize) -> String {
    if n == 0 {
        ids::SANOFI.to_owned()
    } else {
        format!("ORG-{:09}", 900_000_000 + n)
    }
}

/// Entity id of the VMP for formulation `i`.
pub fn formulation_vmp(i: usize) -> String {
    if i == 0 {
        ids::VMP.to_owned()
    } else {
        fixture_id(CanonicalLevel::Vmp, i as u64)
    }
}

pub fn records() -> Vec<OntologyRecord> {
    use CanonicalLevel::*;
    let mut out = Vec::new();
    let org = |org_id: String, name: String, role| OntologyRecord::Organization(Organization { org_id, name, role });

    out.push(org(ids::SANOFI.into(), "Sanofi Medley".into(), OrgRole::Manufacturer));
    for n in 1..MANUFACTURERS {
        out.push(org(org_id(n), format!("Fixture Manufacturer {n:02}"), OrgRole::Manufacturer));
    }
    out.push(org(org_id(100), "ANVISA".into(), OrgRole::Regulator));
    out.push(org(org_id(101), "Hospital Sirio-Libanes".into(), OrgRole::Hospital));
    out.push(org(org_id(102), "Hospital Albert Einstein".into(), OrgRole::Hospital));
    out.push(org(org_id(103), "Public drug database".into(), OrgRole::Database));

    let mut entities = vec![CanonicalEntity::new(ids::SUBSTANCE, Substance, "dipyrone monohydrate")];
    for (i, p) in PARTNERS.iter().enumerate() {
        entities.push(CanonicalEntity::new(fixture_id(Substance, i as u64 + 1), Substance, *p));
    }

    entities.push(CanonicalEntity::new(ids::VTM, Vtm, "dipyrone monohydrate").with_parent(ids::SUBSTANCE));
    for (i, p) in PARTNERS.iter().enumerate() {
        entities.push(
            CanonicalEntity::new(fixture_id(Vtm, i as u64 + 1), Vtm, format!("dipyrone monohydrate + {p}"))
                .with_parent(ids::SUBSTANCE)
                .with_parent(fixture_id(Substance, i as u64 + 1)),
        );
    }

    let mut vmpps: Vec<(String, u32)> = Vec::new();
    let mut other_vmps: Vec<String> = Vec::new();
    for (i, (form, conc, pdf, taxonomy)) in FORMULATIONS.iter().enumerate() {
        let mut e = CanonicalEntity::new(formulation_vmp(i), Vmp, format!("dipyrone monohydrate {conc} {form}"))
            .with_parent(ids::VTM)
            .with_attr("atc", "N02BB02")
            .with_attr("concentration", *conc)
            .with_attr("pharmaceutical_form", *pdf)
            .with_attr("form_taxonomy", *taxonomy)
            .with_attr("quantitative_composition", format!("{conc} dipyrone monohydrate"));
        if i == 0 {
            e = e.with_attr("ddd", "0.167");
        } else {
            other_vmps.push(e.entity_id.0.clone());
        }
        entities.push(e);
    }
    let mut combo_vmp = 100;
    for (i, p) in PARTNERS.iter().enumerate() {
        let vtm = fixture_id(Vtm, i as u64 + 1);
        let forms: &[(&str, &str)] = if i == PARTNERS.len() - 1 {
            &[("tablet", "oral / solid / ingestion / conventional release")]
        } else {
            &[
                ("tablet", "oral / solid / ingestion / conventional release"),
                ("oral solution", "oral / liquid / ingestion / conventional release"),
            ]
        };
        for (form, taxonomy) in forms {
            combo_vmp += 1;
            let id = fixture_id(Vmp, combo_vmp);
            entities.push(
                CanonicalEntity::new(&id, Vmp, format!("dipyrone monohydrate + {p} {form}"))
                    .with_parent(&vtm)
                    .with_attr("atc", "N02BB52")
                    .with_attr("pharmaceutical_form", *form)
                    .with_attr("form_taxonomy", *taxonomy),
            );
            other_vmps.push(id);
        }
    }

    for (i, size) in PACK_SIZES.iter().enumerate() {
        let id = if i == 0 { ids::VMPP.to_owned() } else { fixture_id(Vmpp, i as u64) };
        entities.push(
            CanonicalEntity::new(&id, Vmpp, format!("dipyrone 500 mg x {size} tablets"))
                .with_parent(ids::VMP)
                .with_attr("prescribable_unit", "tablet")
                .with_attr("primary_packaging", "blister")
                .with_attr("pack_size", size.to_string()),
        );
        vmpps.push((id, *size));
    }
    for (i, vmp) in other_vmps.iter().enumerate() {
        entities.push(
            CanonicalEntity::new(fixture_id(Vmpp, 100 + i as u64), Vmpp, "single pack")
                .with_parent(vmp)
                .with_attr("prescribable_unit", "unit")
                .with_attr("pack_size", "1"),
        );
    }

    let mut identifiers = Vec::new();
    let mut trade = 0u64;
    for ((vmpp, size), count) in vmpps.iter().zip(TRADE_PER_PACK) {
        for _ in 0..count {
            trade += 1;
            let manufacturer = (trade as usize - 1) % MANUFACTURERS;
            let novalgina = trade == 1;
            let (amp_id, ampp_id) = if novalgina {
                (ids::AMP.to_owned(), ids::AMPP.to_owned())
            } else {
                (fixture_id(Amp, trade), fixture_id(Ampp, trade))
            };
            let (brand, registration, category) = if novalgina {
                ("NOVALGINA".to_owned(), "PMA 183260351".to_owned(), "reference")
            } else {
                (format!("DIPIRONA FM{manufacturer:02}"), format!("PMA 9{trade:08}"), "generic")
            };
            entities.push(
                CanonicalEntity::new(&amp_id, Amp, format!("{brand} 500 mg"))
                    .with_parent(vmpp)
                    .with_attr("brand", &brand)
                    .with_attr("manufacturer", org_id(manufacturer))
                    .with_attr("registration", registration)
                    .with_attr("therapeutic_class", "non-narcotic analgesics"),
            );
            let ean = if novalgina { ids::EAN.to_owned() } else { ean_with_check(&format!("7890000{trade:05}")) };
            entities.push(
                CanonicalEntity::new(&ampp_id, Ampp, format!("{brand} 500 mg box x {size}"))
                    .with_parent(&amp_id)
                    .with_attr("ean", &ean)
                    .with_attr("label", "OTC")
                    .with_attr("authorization_status", "valid")
                    .with_attr("marketing_date", "2019-03-11")
                    .with_attr("marketing_status", "marketed")
                    .with_attr("regulatory_category", category)
                    .with_attr("storage", "15-30 °C")
                    .with_attr("shelf_life", "24 months"),
            );
            identifiers.push(ExternalIdentifier { scheme: "EAN".into(), value: ean, entity_id: ampp_id.as_str().into() });
        }
    }

    out.extend(entities.into_iter().map(OntologyRecord::Entity));
    let sub = EntityId::from(ids::SUBSTANCE);
    let ident = |scheme: &str, value: &str| ExternalIdentifier {
        scheme: scheme.into(),
        value: value.into(),
        entity_id: sub.clone(),
    };
    out.push(OntologyRecord::Identifier(ident("CAS", "5907-38-0")));
    out.push(OntologyRecord::Identifier(ident("UNII", "6429L0L52Y")));
    for (i, scheme) in INTERNATIONAL_SCHEMES.iter().enumerate() {
        out.push(OntologyRecord::Identifier(ident(scheme, &format!("FX-{:04}", i + 1))));
    }
    out.push(OntologyRecord::Identifier(ident("DCB", "9564")));
    out.extend(identifiers.into_iter().map(OntologyRecord::Identifier));
    for (text, lang) in SYNONYMS {
        out.push(OntologyRecord::Synonym(Synonym {
            entity_id: sub.clone(),
            text: text.into(),
            language: Some(lang.into()),
        }));
    }
    out
}
