use criterion::{criterion_group, criterion_main, Criterion};
use plp_core::fixture::{self, extend_to_graph_count, fixture_clock};
use plp_core::refraction::{refract_in_memory, Execution, ViewKind};
use plp_core::Corpus;

const GRAPHS: usize = 55_555;

fn bench(c: &mut Criterion) {
    let dir = tempfile::tempdir().expect("tempdir");
    let corpus = Corpus::open(dir.path(), fixture_clock()).expect("corpus");
    fixture::load_dipyrone(&corpus).expect("fixture");
    extend_to_graph_count(&corpus.ontology, GRAPHS).expect("synthetic ontology");

    let mut group = c.benchmark_group("refract_all");
    group.sample_size(10);
    let mut modes = vec![("sequential", Execution::Sequential)];
    #[cfg(feature = "parallel")]
    modes.push(("parallel", Execution::Parallel));
    for (name, execution) in modes {
        group.bench_function(format!("in_memory/{name}"), |b| {
            b.iter(|| corpus.with_snapshot(|s| refract_in_memory(s, &ViewKind::ALL, execution).len()))
        });
        group.bench_function(format!("materialize/{name}"), |b| {
            b.iter(|| corpus.refract_all(&ViewKind::ALL, execution).expect("materialize").graph_count)
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
