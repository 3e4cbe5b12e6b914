use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::{json, Value};

use plp_core::clock::Clock;
use plp_core::fixture::ids;
use plp_core::ontology::EntityId;
use plp_core::refraction::{graph_id, ViewKind};
use plp_core::Corpus;
use plp_service::structured;

struct Run {
    code: i32,
    stdout: Vec<u8>,
    stderr: String,
}

impl Run {
    fn text(&self) -> String {
        String::from_utf8(self.stdout.clone()).unwrap()
    }

    fn json(&self) -> Value {
        serde_json::from_slice(&self.stdout).unwrap()
    }
}

fn plp(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_plp"))
        .arg("--data-dir")
        .arg(dir)
        .args(args)
        .env_remove("PLP_DATA_DIR")
        .env_remove("PLP_CURATOR_ID")
        .output()
        .unwrap();
    Run { code: out.status.code().unwrap(), stdout: out.stdout, stderr: String::from_utf8(out.stderr).unwrap() }
}

fn ok(dir: &Path, args: &[&str]) -> Run {
    let r = plp(dir, args);
    assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
    r
}

fn fixture() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["-q", "fixture", "load-dipyrone"]);
    dir
}

#[test]
fn fixture_then_metrics_prints_the_counts() {
    let dir = fixture();
    let text = ok(dir.path(), &["metrics"]).text();
    for line in ["packs 38", "accepted 37", "rejected 1", "links 119", "page_index_trees 31", "documents 192"] {
        assert!(text.lines().any(|l| l == line), "missing {line}:\n{text}");
    }
}

#[test]
fn structured_output_is_the_canonical_serialization() {
    let dir = fixture();
    let a = ok(dir.path(), &["--output", "structured", "refract", ids::VMP, "CTX_VMP_COMPLETE"]);
    let b = ok(dir.path(), &["--output", "structured", "refract", ids::VMP, "CTX_VMP_COMPLETE"]);
    assert_eq!(a.stdout, b.stdout);

    let gid = graph_id(ViewKind::Prescription, ids::VMP);
    let t = ok(dir.path(), &["--output", "structured", "trace", &gid, "assertion:EP-001"]);
    let v = ok(dir.path(), &["--output", "structured", "pack", "validate", "EP-001"]);

    let corpus = Corpus::open(dir.path(), Clock::System).unwrap();
    assert_eq!(a.stdout, structured(&corpus.refract(&EntityId::from(ids::VMP), ViewKind::Prescription).unwrap()));
    assert_eq!(t.stdout, structured(&corpus.trace(&gid, "assertion:EP-001").unwrap()));
    assert_eq!(v.stdout, structured(&corpus.validate_pack(&"EP-001".into()).unwrap()));
    assert_eq!(fs::read(corpus.graphs.path_for(&gid)).unwrap(), a.stdout[..a.stdout.len() - 1]);
}

#[test]
fn empty_provenance_pack_fails_on_condition_two() {
    let dir = fixture();
    let mut pack = ok(dir.path(), &["--output", "structured", "pack", "show", "EP-002"]).json()["pack"].clone();
    pack["provenance"] = json!([]);
    let file = dir.path().join("ep-empty.json");
    fs::write(&file, serde_json::to_vec(&pack).unwrap()).unwrap();

    let r = plp(dir.path(), &["--output", "structured", "pack", "validate", file.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert_eq!(r.json()["violations"], json!([2]));
    let err: Value = serde_json::from_str(&r.stderr).unwrap();
    assert_eq!(err["code"], "structural_violation");
    assert_eq!(err["detail"]["conditions"], json!([2]));

    let r = plp(dir.path(), &["pack", "new", file.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("structural_violation"), "{}", r.stderr);
}

#[test]
fn failures_exit_nonzero_with_the_error_code() {
    let dir = fixture();
    let cases: &[(&[&str], &str)] = &[
        (&["pack", "validate", "EP-999"], "unknown_pack"),
        (&["refract", ids::VTM, "CTX_VMP_COMPLETE"], "level_view_mismatch"),
        (&["refract", ids::VMP, "CTX_NOWHERE"], "invalid_input"),
        (&["trace", "CTX_VMP_COMPLETE__VMP-000000001", "assertion:EP-001"], "unknown_graph"),
        (&["link", "EP-025", ids::VMP], "pack_not_accepted"),
        (&["verify", "DOC-none"], "unknown_document"),
        (&["index", "DOC-none", "--reader", "mistral"], "invalid_input"),
        (&["refract-all", "--bench", "--target", "10"], "invalid_input"),
        (&["fixture", "load-dipyrone"], "invalid_input"),
    ];
    for (args, code) in cases {
        let r = plp(dir.path(), args);
        assert_eq!(r.code, 1, "{args:?}");
        let last = r.stderr.lines().last().unwrap_or_default();
        assert!(last.starts_with(&format!("error: {code}:")), "{args:?}: {}", r.stderr);
        let quiet = plp(dir.path(), &[&["-q", "--output", "structured"], *args].concat());
        let err: Value = serde_json::from_str(&quiet.stderr).unwrap();
        assert_eq!(err["code"], *code);
    }
    let r = plp(dir.path(), &["refract"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.starts_with("error: invalid_input:"));
}

#[test]
fn quiet_success_writes_nothing_to_stderr() {
    let dir = fixture();
    let commands: &[&[&str]] = &[
        &["metrics"],
        &["verify", "--all"],
        &["refract-all"],
        &["refract-all", "--sequential", "--views", "CTX_SUBSTANCE_PROFILE"],
        &["refract-all", "--bench", "--target", "400"],
        &["ontology", "export"],
        &["pack", "list", "--state", "under_review"],
    ];
    for args in commands {
        for format in ["human", "structured"] {
            let r = ok(dir.path(), &[&["-q", "--output", format], *args].concat());
            assert!(r.stderr.is_empty(), "{args:?}: {}", r.stderr);
            assert!(!r.stdout.is_empty() || args[0] == "pack");
        }
    }
    let loud = ok(dir.path(), &["refract-all", "--bench", "--target", "500"]);
    assert!(!loud.stderr.is_empty());
}

#[test]
fn bench_reports_the_requested_graph_count() {
    let dir = tempfile::tempdir().unwrap();
    let r = ok(dir.path(), &["-q", "--output", "structured", "refract-all", "--bench", "--target", "1234"]);
    let b = r.json();
    assert_eq!(b["graph_count"], 1234);
    assert_eq!(b["failures"], 0);
    assert_eq!(b["synthetic"]["graphs_before"], 0);
    let again = ok(dir.path(), &["--output", "structured", "refract-all"]).json();
    assert_eq!(again["graph_count"], 1234);
    assert_eq!(again["manifest_digest"], b["manifest_digest"]);
    let human = ok(dir.path(), &["-q", "refract-all", "--bench", "--target", "1234"]).text();
    assert!(human.starts_with("graph_count 1234\nelapsed "), "{human}");
}

fn write_manifest(dir: &Path) -> std::path::PathBuf {
    let src = dir.join("src");
    fs::create_dir_all(&src).unwrap();
    fs::write(src.join("novalgina.pdf"), b"%PDF-1.4 novalgina professional insert").unwrap();
    fs::write(
        src.join("novalgina.txt"),
        "1 INDICATIONS\n1.1 What is this medication indicated for?\nAnalgesic and antipyretic.\n2 CONTRAINDICATIONS\n",
    )
    .unwrap();
    let record = json!({
        "source": "ANVISA",
        "registration_id": "186200018",
        "doc_kind": "professional_insert",
        "medication_name": "novalgina",
        "version_label": "20260116",
        "format": "pdf",
        "capture_date": "2026-01-28",
        "path": "novalgina.pdf",
        "cleaned_path": "novalgina.txt",
    });
    let manifest = src.join("manifest.jsonl");
    fs::write(&manifest, format!("{record}\n")).unwrap();
    manifest
}

#[test]
fn ingest_index_curate_link_and_refract() {
    let work = tempfile::tempdir().unwrap();
    let data = work.path().join("data");
    let manifest = write_manifest(work.path());
    let docs = ok(&data, &["--output", "structured", "ingest", manifest.to_str().unwrap()]).json();
    let doc = docs[0].clone();
    let doc_id = doc["doc_id"].as_str().unwrap();
    assert_eq!(doc["maturity"], "CLEANED");
    assert_eq!(doc["is_current"], true);
    let again = ok(&data, &["--output", "structured", "ingest", manifest.to_str().unwrap()]).json();
    assert_eq!(again, docs);

    let tree = ok(&data, &["--output", "structured", "index", doc_id]).json();
    assert_eq!(tree["roots"][0]["node_id"], "1");
    assert!(ok(&data, &["index", doc_id]).text().contains("3 nodes"));

    let entity = json!({"type": "entity", "entity_id": "VMP-000051605", "level": "VMP",
        "display_name": "dipyrone monohydrate 500 mg tablet", "parent_ids": [], "attributes": {"atc": "N02BB02"}});
    let records = work.path().join("ontology.jsonl");
    fs::write(&records, format!("{entity}\n")).unwrap();
    assert_eq!(ok(&data, &["-q", "ontology", "load", records.to_str().unwrap()]).text(), "loaded 1 records\n");

    let pack = json!({
        "question": {"text": "Is dipyrone indicated for fever?", "assertion_type": "INDICATION"},
        "response": {"assertion": "Indicated as antipyretic", "validity_conditions": [], "invalidity_conditions": []},
        "provenance": [{"doc_id": doc_id, "version_label": "20260116", "checksum": doc["checksum"], "node_ids": ["1.1"]}],
        "limits": {"divergences": [], "gaps": [], "dependencies": [], "silences": []},
        "focus": "dipyrone monohydrate 500 mg tablet",
    });
    let file = work.path().join("pack.json");
    fs::write(&file, pack.to_string()).unwrap();
    assert_eq!(ok(&data, &["pack", "new", file.to_str().unwrap()]).text(), "EP-001 draft INDICATION \"Is dipyrone indicated for fever?\"\n");
    ok(&data, &["pack", "validate", "EP-001"]);
    ok(&data, &["pack", "submit", "EP-001"]);
    let r = plp(&data, &["pack", "curate", "EP-001", "--verdict", "accept", "--curator", "curator.pharm.01"]);
    assert!(r.stderr.starts_with("error: missing_justification"), "{}", r.stderr);
    let r = plp(&data, &["pack", "curate", "EP-001", "--verdict", "accept", "--justification", "section 1.1"]);
    assert!(r.stderr.starts_with("error: missing_curator"), "{}", r.stderr);
    let accepted = Command::new(env!("CARGO_BIN_EXE_plp"))
        .args(["--data-dir", data.to_str().unwrap(), "pack", "curate", "EP-001", "--verdict", "accept"])
        .args(["--justification", "section 1.1"])
        .env("PLP_CURATOR_ID", "curator.pharm.01")
        .output()
        .unwrap();
    assert!(accepted.status.success());
    ok(&data, &["link", "EP-001", "VMP-000051605"]);

    let g = ok(&data, &["--output", "structured", "refract", "VMP-000051605", "CTX_VMP_COMPLETE"]).json();
    assert!(g["nodes"].as_array().unwrap().iter().any(|n| n["id"] == "assertion:EP-001"));
    let gid = graph_id(ViewKind::Prescription, "VMP-000051605");
    ok(&data, &["refract-all"]);
    let chain = ok(&data, &["--output", "structured", "trace", &gid, "assertion:EP-001"]).json();
    assert_eq!(chain["verified"], true);
    assert_eq!(chain["curator"], "curator.pharm.01");

    let blob = Corpus::open(&data, Clock::System).unwrap().patos.blob_path(doc["checksum"].as_str().unwrap());
    let mut bytes = fs::read(&blob).unwrap();
    bytes[3] ^= 0x20;
    fs::write(&blob, &bytes).unwrap();
    let r = plp(&data, &["verify", "--all"]);
    assert_eq!(r.code, 1);
    assert!(r.text().contains("corrupted (RAW)"), "{}", r.text());
    assert!(r.stderr.starts_with("error: integrity_violation"));
    let chain = ok(&data, &["--output", "structured", "trace", &gid, "assertion:EP-001"]).json();
    assert_eq!(chain["verified"], false);
    assert_eq!(chain["entries"][0]["status"], "corrupted");
}

#[test]
fn ontology_export_round_trips() {
    let dir = fixture();
    let exported = ok(dir.path(), &["ontology", "export"]).text();
    let is_link = |l: &&str| serde_json::from_str::<Value>(l).unwrap()["type"] == "link";
    assert_eq!(exported.lines().filter(is_link).count(), 119);
    let without_links: String = exported.lines().filter(|l| !is_link(l)).map(|l| format!("{l}\n")).collect();

    let file = dir.path().join("export.jsonl");
    fs::write(&file, &exported).unwrap();
    let fresh = tempfile::tempdir().unwrap();
    let r = plp(fresh.path(), &["ontology", "load", file.to_str().unwrap()]);
    assert!(r.stderr.starts_with("error: pack_not_accepted"), "{}", r.stderr);

    fs::write(&file, &without_links).unwrap();
    ok(fresh.path(), &["-q", "ontology", "load", file.to_str().unwrap()]);
    assert_eq!(ok(fresh.path(), &["ontology", "export"]).text(), without_links);
}
