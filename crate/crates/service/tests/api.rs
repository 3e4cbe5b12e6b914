use std::collections::BTreeSet;

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::Router;
use serde_json::{json, Value};
use tower::ServiceExt;

use plp_core::clock::Clock;
use plp_core::fixture::{self, fixture_clock, ids};
use plp_core::ontology::EntityId;
use plp_core::refraction::{graph_id, ViewKind};
use plp_core::Corpus;
use plp_service::{router, structured, AppState, CURATOR_HEADER, IDEMPOTENCY_HEADER, REPLAYED_HEADER};

struct Reply {
    status: StatusCode,
    replayed: bool,
    body: Vec<u8>,
}

impl Reply {
    fn json(&self) -> Value {
        serde_json::from_slice(&self.body).unwrap()
    }
}

async fn call(app: &Router, method: &str, uri: &str, headers: &[(&str, &str)], body: Option<Value>) -> Reply {
    let mut req = Request::builder().method(method).uri(uri);
    for (k, v) in headers {
        req = req.header(*k, *v);
    }
    let body = body.map(|b| Body::from(serde_json::to_vec(&b).unwrap())).unwrap_or_else(Body::empty);
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let replayed = resp.headers().contains_key(REPLAYED_HEADER);
    let body = to_bytes(resp.into_body(), usize::MAX).await.unwrap().to_vec();
    assert_eq!(body.last(), Some(&b'\n'), "bodies end with a newline");
    Reply { status, replayed, body }
}

fn fixture_app() -> (tempfile::TempDir, Router) {
    let dir = tempfile::tempdir().unwrap();
    {
        let corpus = Corpus::open(dir.path(), fixture_clock()).unwrap();
        fixture::load_dipyrone(&corpus).unwrap();
    }
    let state = AppState::open(dir.path(), Clock::System).unwrap();
    (dir, router(state))
}

fn empty_app() -> (tempfile::TempDir, Router) {
    let dir = tempfile::tempdir().unwrap();
    let state = AppState::open(dir.path(), Clock::System).unwrap();
    (dir, router(state))
}

fn ingest_body(label: &str, content: &str) -> Value {
    use base64::Engine;
    json!({
        "source": "ANVISA",
        "registration_id": "186200018",
        "doc_kind": "professional_insert",
        "medication_name": "novalgina",
        "version_label": label,
        "format": "PDF",
        "capture_date": "2026-01-28",
        "content_base64": base64::engine::general_purpose::STANDARD.encode(content),
    })
}

fn pack_body(doc: &Value, nodes: &[&str]) -> Value {
    json!({
        "question": { "text": "Is dipyrone indicated for fever?", "assertion_type": "INDICATION" },
        "response": {
            "assertion": "Indicated as antipyretic",
            "validity_conditions": ["adults"],
            "invalidity_conditions": []
        },
        "provenance": [{
            "doc_id": doc["doc_id"],
            "version_label": doc["version_label"],
            "checksum": doc["checksum"],
            "node_ids": nodes,
        }],
        "limits": { "divergences": [], "gaps": [], "dependencies": [], "silences": [] },
        "focus": "dipyrone monohydrate 500 mg tablet",
    })
}

#[tokio::test]
async fn metrics_on_the_fixture() {
    let (_dir, app) = fixture_app();
    let r = call(&app, "GET", "/metrics", &[], None).await;
    assert_eq!(r.status, StatusCode::OK);
    let m = r.json();
    assert_eq!(m["packs_total"], 38);
    assert_eq!(m["packs_accepted"], 37);
    assert_eq!(m["packs_rejected"], 1);
    assert_eq!(m["links_total"], 119);
    assert_eq!(m["curatorial_coverage"].as_f64().unwrap(), 37.0 / 38.0);
    assert_eq!(m["provenance_completeness"].as_f64().unwrap(), 1.0);
    assert_eq!(m["accountability"].as_f64().unwrap(), 1.0);
}

#[tokio::test]
async fn view_and_trace_match_the_library_bytes() {
    let (dir, app) = fixture_app();
    let uri = format!("/entities/{}/views/CTX_VMP_COMPLETE", ids::VMP);
    let r = call(&app, "GET", &uri, &[], None).await;
    assert_eq!(r.status, StatusCode::OK);

    let corpus = Corpus::open(dir.path(), Clock::System).unwrap();
    let g = corpus.refract(&EntityId::from(ids::VMP), ViewKind::Prescription).unwrap();
    assert_eq!(r.body, structured(&g));
    let v = r.json();
    let attrs: Vec<&Value> = v["nodes"].as_array().unwrap().iter().filter(|n| n["kind"] == "attribute").collect();
    assert!(attrs.iter().any(|n| n["props"]["key"] == "atc" && n["props"]["value"] == "N02BB02"));

    let gid = graph_id(ViewKind::Prescription, ids::VMP);
    let r = call(&app, "GET", &format!("/graphs/{gid}/trace/assertion:EP-001"), &[], None).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.body, structured(&corpus.trace(&gid, "assertion:EP-001").unwrap()));
    assert_eq!(r.json()["verified"], true);

    let r = call(&app, "GET", "/packs/EP-001/validate", &[], None).await;
    assert_eq!(r.body, structured(&corpus.validate_pack(&"EP-001".into()).unwrap()));
    assert_eq!(r.json()["well_formed"], true);

    let r = call(&app, "GET", &format!("{uri}?types=CONTRAINDICATION"), &[], None).await;
    let kinds: BTreeSet<String> = r.json()["nodes"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|n| n["kind"] == "assertion")
        .map(|n| n["props"]["assertion_type"].as_str().unwrap().to_owned())
        .collect();
    assert_eq!(kinds, BTreeSet::from(["CONTRAINDICATION".to_owned()]));
}

#[tokio::test]
async fn errors_use_the_envelope() {
    let (_dir, app) = fixture_app();
    let r = call(&app, "GET", &format!("/entities/{}/views/CTX_VMP_COMPLETE", ids::VTM), &[], None).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["code"], "level_view_mismatch");
    assert_eq!(r.json()["detail"]["view"], "CTX_VMP_COMPLETE");

    let r = call(&app, "GET", "/packs/EP-999/validate", &[], None).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    assert_eq!(r.json()["code"], "unknown_pack");

    let r = call(&app, "GET", "/entities/VMP-000051605/views/CTX_ADMINISTRATION", &[], None).await;
    assert_eq!(r.json()["code"], "invalid_input");

    let r = call(&app, "GET", "/graphs/CTX_VMP_COMPLETE__VMP-000051605/trace/entity:VMP-000051605", &[], None).await;
    assert_eq!(r.json()["code"], "not_an_assertion_node");

    let r = call(&app, "POST", "/links", &[], Some(json!({"pack_id": "EP-025", "entity_id": ids::VMP}))).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    assert_eq!(r.json()["code"], "pack_not_accepted");

    let r = call(&app, "GET", "/nowhere", &[], None).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    assert_eq!(r.json()["code"], "no_route");

    let r = call(&app, "POST", "/packs", &[], Some(json!({"question": 1}))).await;
    assert_eq!(r.json()["code"], "invalid_input");
}

#[tokio::test]
async fn ingest_curate_link_and_refract() {
    let (_dir, app) = empty_app();
    let r = call(&app, "POST", "/documents", &[], Some(ingest_body("20260116", "1. INDICATIONS\nfever"))).await;
    assert_eq!(r.status, StatusCode::CREATED);
    let doc = r.json();
    let again = call(&app, "POST", "/documents", &[], Some(ingest_body("20260116", "1. INDICATIONS\nfever"))).await;
    assert_eq!(again.status, StatusCode::OK);
    assert_eq!(again.body, r.body);
    let conflict = call(&app, "POST", "/documents", &[], Some(ingest_body("20260116", "changed"))).await;
    assert_eq!(conflict.status, StatusCode::CONFLICT);
    assert_eq!(conflict.json()["code"], "duplicate_version_conflict");

    let id = doc["doc_id"].as_str().unwrap().to_owned();
    let r = call(&app, "GET", &format!("/documents/{id}/versions"), &[], None).await;
    assert_eq!(r.json().as_array().unwrap().len(), 1);
    let r = call(&app, "POST", &format!("/documents/{id}/verify"), &[], None).await;
    assert_eq!(r.json()["status"], "ok");

    let r = call(&app, "POST", "/packs", &[], Some(pack_body(&doc, &["1"]))).await;
    assert_eq!(r.status, StatusCode::CREATED);
    let pid = r.json()["pack_id"].as_str().unwrap().to_owned();
    assert_eq!(r.json()["status"]["state"], "draft");

    let r = call(&app, "POST", &format!("/packs/{pid}/submit"), &[], None).await;
    assert_eq!(r.json()["status"]["state"], "under_review");
    let queue = call(&app, "GET", "/packs?state=under_review", &[], None).await;
    assert_eq!(queue.json().as_array().unwrap().len(), 1);

    let curate = format!("/packs/{pid}/curate");
    let r = call(&app, "POST", &curate, &[(CURATOR_HEADER, "curator.pharm.01")], Some(json!({"verdict": "accept"})))
        .await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(r.json()["code"], "missing_justification");
    let r = call(&app, "POST", &curate, &[], Some(json!({"verdict": "accept", "justification": "ok"}))).await;
    assert_eq!(r.json()["code"], "missing_curator");
    let r = call(
        &app,
        "POST",
        &curate,
        &[(CURATOR_HEADER, "curator.pharm.01")],
        Some(json!({"verdict": "accept", "justification": "Matches section 1"})),
    )
    .await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json()["decision"]["curator"], "curator.pharm.01");
    assert_eq!(r.json()["pack"]["status"]["state"], "accepted");
    let queue = call(&app, "GET", "/packs?state=under_review", &[], None).await;
    assert!(queue.json().as_array().unwrap().is_empty());

    let r = call(
        &app,
        "POST",
        &curate,
        &[(CURATOR_HEADER, "curator.pharm.02")],
        Some(json!({"verdict": "reject", "justification": "second thoughts"})),
    )
    .await;
    assert_eq!(r.json()["code"], "illegal_transition");

    let r = call(&app, "GET", &format!("/packs/{pid}"), &[], None).await;
    assert_eq!(r.json()["decision"]["justification"], "Matches section 1");
}

#[tokio::test]
async fn structural_violations_are_reported_by_condition() {
    let (_dir, app) = empty_app();
    let doc = call(&app, "POST", "/documents", &[], Some(ingest_body("v1", "text"))).await.json();
    let mut body = pack_body(&doc, &["1"]);
    body["provenance"] = json!([]);
    body["limits"].as_object_mut().unwrap().remove("gaps");
    let r = call(&app, "POST", "/packs", &[], Some(body)).await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(r.json()["code"], "structural_violation");
    assert_eq!(r.json()["detail"]["conditions"], json!([2, 5]));
}

#[tokio::test]
async fn idempotency_key_replays_the_first_result() {
    let (_dir, app) = empty_app();
    let doc = call(&app, "POST", "/documents", &[], Some(ingest_body("v1", "text"))).await.json();
    let key = [(IDEMPOTENCY_HEADER, "create-1")];
    let first = call(&app, "POST", "/packs", &key, Some(pack_body(&doc, &["1"]))).await;
    let second = call(&app, "POST", "/packs", &key, Some(pack_body(&doc, &["1"]))).await;
    assert_eq!(first.status, StatusCode::CREATED);
    assert_eq!(second.status, StatusCode::CREATED);
    assert!(!first.replayed && second.replayed);
    assert_eq!(first.body, second.body);
    let all = call(&app, "GET", "/packs", &[], None).await;
    assert_eq!(all.json().as_array().unwrap().len(), 1);

    let other = call(&app, "POST", "/packs", &key, Some(pack_body(&doc, &["2"]))).await;
    assert_eq!(other.status, StatusCode::CONFLICT);
    assert_eq!(other.json()["code"], "idempotency_key_reused");

    let unkeyed = call(&app, "POST", "/packs", &[], Some(pack_body(&doc, &["1"]))).await;
    assert_eq!(unkeyed.json()["pack_id"], "EP-002");
}

#[tokio::test]
async fn entity_detail_search_and_rematerialization() {
    let (_dir, app) = fixture_app();
    let r = call(&app, "GET", &format!("/entities/{}", ids::SUBSTANCE), &[], None).await;
    let d = r.json();
    assert_eq!(d["graphs"], json!([graph_id(ViewKind::SubstanceProfile, ids::SUBSTANCE)]));
    assert!(d["identifiers"].as_array().unwrap().iter().any(|i| i["scheme"] == "DCB" && i["value"] == "9564"));

    let r = call(&app, "GET", "/search?q=7891058008635", &[], None).await;
    assert_eq!(r.json()[0]["entity_id"], ids::AMPP);
    let r = call(&app, "GET", "/search?q=", &[], None).await;
    assert_eq!(r.json()["code"], "invalid_input");

    let r = call(&app, "POST", "/refract-all?views=CTX_SUBSTANCE_PROFILE", &[], None).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json()["graph_count"], 16);
    let r = call(&app, "GET", &format!("/graphs/{}", graph_id(ViewKind::Regulatory, ids::AMPP)), &[], None).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json()["root_entity_id"], ids::AMPP);
}
