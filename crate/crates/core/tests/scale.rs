use plp_core::fixture::{self, extend_to_graph_count, fixture_clock};
use plp_core::refraction::{Execution, ViewKind};
use plp_core::Corpus;

const TARGET: usize = 55_555;

#[test]
fn synthetic_ontology_reaches_target_with_stable_digests() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = Corpus::open(dir.path(), fixture_clock()).unwrap();
    fixture::load_dipyrone(&corpus).unwrap();
    let report = extend_to_graph_count(&corpus.ontology, TARGET).unwrap();
    assert_eq!(report.graphs_after, TARGET);

    let first = corpus.refract_all(&ViewKind::ALL, Execution::default()).unwrap();
    assert_eq!(first.graph_count, TARGET);
    assert!(first.failures.is_empty());
    let second = corpus.refract_all(&ViewKind::ALL, Execution::Sequential).unwrap();
    assert_eq!(second.graph_count, TARGET);
    assert_eq!(first.manifest_digest, second.manifest_digest);
    assert_eq!(corpus.graphs.read_manifest().unwrap().len(), TARGET);
    eprintln!("refract-all {:?} then {:?}", first.elapsed, second.elapsed);
}

#[test]
fn extension_is_incremental() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = Corpus::open(dir.path(), fixture_clock()).unwrap();
    fixture::load_dipyrone(&corpus).unwrap();
    let first = extend_to_graph_count(&corpus.ontology, 1_000).unwrap();
    let again = extend_to_graph_count(&corpus.ontology, 1_000).unwrap();
    assert_eq!(first.graphs_after, 1_000);
    assert_eq!(again.entities_added, 0);
    let grown = extend_to_graph_count(&corpus.ontology, 2_017).unwrap();
    assert_eq!(grown.graphs_after, 2_017);
    assert_eq!(grown.graphs_before, 1_000);
    assert!(extend_to_graph_count(&corpus.ontology, 10).is_err());
}
