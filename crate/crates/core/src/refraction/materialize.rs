use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::build::Snapshot;
use super::graph::ContextGraph;
use super::view::ViewKind;
use super::RefractionError;
use crate::ontology::EntityId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        return Execution::Parallel;
        #[cfg(not(feature = "parallel"))]
        return Execution::Sequential;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub digest: String,
    pub graph_id: String,
    pub root_entity_id: String,
    pub view: ViewKind,
}

impl ManifestEntry {
    pub fn of(g: &ContextGraph) -> Self {
        Self {
            digest: g.content_digest.clone(),
            graph_id: g.graph_id.clone(),
            root_entity_id: g.root_entity_id.clone(),
            view: g.view,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaterializationFailure {
    pub entity_id: EntityId,
    pub view: ViewKind,
    pub error: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaterializationReport {
    pub graph_count: usize,
    #[serde(with = "millis")]
    pub elapsed: Duration,
    pub failures: Vec<MaterializationFailure>,
    /// Digest over the sorted manifest; equal runs give equal values.
    pub manifest_digest: String,
}

mod millis {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64() * 1000.0)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_secs_f64(f64::deserialize(d)? / 1000.0))
    }
}

/// One JSON file per graph plus a line-delimited manifest.
#[derive(Debug, Clone)]
pub struct GraphStore {
    root: PathBuf,
}

impl GraphStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path_for(&self, graph_id: &str) -> PathBuf {
        self.root.join(format!("{graph_id}.json"))
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.root.join("manifest.jsonl")
    }

    pub fn write(&self, graph: &ContextGraph) -> io::Result<()> {
        fs::write(self.path_for(&graph.graph_id), graph.canonical_bytes())
    }

    pub fn read(&self, graph_id: &str) -> io::Result<Option<ContextGraph>> {
        match fs::read(self.path_for(graph_id)) {
            Ok(bytes) => serde_json::from_slice(&bytes).map(Some).map_err(io::Error::other),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e),
        }
    }

    pub fn write_manifest(&self, entries: &[ManifestEntry]) -> io::Result<()> {
        let tmp = self.root.join("manifest.jsonl.tmp");
        let mut f = io::BufWriter::new(fs::File::create(&tmp)?);
        for e in entries {
            serde_json::to_writer(&mut f, e)?;
            f.write_all(b"\n")?;
        }
        f.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        fs::rename(tmp, self.manifest_path())
    }

    pub fn read_manifest(&self) -> io::Result<Vec<ManifestEntry>> {
        let text = match fs::read_to_string(self.manifest_path()) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e),
        };
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(io::Error::other))
            .collect()
    }
}

pub fn manifest_digest(entries: &[ManifestEntry]) -> String {
    let mut buf = Vec::new();
    for e in entries {
        serde_json::to_writer(&mut buf, e).expect("entry serializes");
        buf.push(b'\n');
    }
    crate::canonical::sha256_hex(&buf)
}

fn run<T, F>(jobs: &[(EntityId, ViewKind)], execution: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&(EntityId, ViewKind)) -> T + Sync + Send,
{
    match execution {
        Execution::Sequential => jobs.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => jobs.par_iter().map(f).collect(),
    }
}

/// Refracts every eligible (entity, view) pair without touching disk.
pub fn refract_in_memory(
    snap: &Snapshot<'_>,
    views: &[ViewKind],
    execution: Execution,
) -> Vec<Result<ContextGraph, (EntityId, ViewKind, RefractionError)>> {
    let jobs = snap.eligible(views);
    run(&jobs, execution, |(id, v)| snap.refract(id, *v).map_err(|e| (id.clone(), *v, e)))
}

/// Refracts every eligible pair and writes graphs plus manifest to `store`.
/// Per-graph failures are collected, not raised.
pub fn refract_all(
    snap: &Snapshot<'_>,
    views: &[ViewKind],
    store: &GraphStore,
    execution: Execution,
) -> io::Result<MaterializationReport> {
    let started = Instant::now();
    fs::create_dir_all(store.root())?;
    let jobs = snap.eligible(views);
    let results = run(&jobs, execution, |(id, v)| {
        let fail = |error: String| MaterializationFailure { entity_id: id.clone(), view: *v, error };
        let g = snap.refract(id, *v).map_err(|e| fail(e.to_string()))?;
        store.write(&g).map_err(|e| fail(e.to_string()))?;
        Ok(ManifestEntry::of(&g))
    });
    let mut entries = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(e) => entries.push(e),
            Err(f) => failures.push(f),
        }
    }
    entries.sort_by(|a, b| a.graph_id.cmp(&b.graph_id));
    store.write_manifest(&entries)?;
    Ok(MaterializationReport {
        graph_count: entries.len(),
        elapsed: started.elapsed(),
        failures,
        manifest_digest: manifest_digest(&entries),
    })
}
