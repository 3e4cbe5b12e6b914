//! Replay of mutating requests that carry an `Idempotency-Key` header.

use std::collections::HashMap;
use std::io;
use std::path::Path;
use std::sync::Mutex;

use plp_core::journal::Journal;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredResponse {
    pub key: String,
    pub route: String,
    /// Digest of the request that produced the response.
    pub fingerprint: String,
    pub status: u16,
    pub body: String,
}

pub enum Lookup {
    Miss,
    Replay(StoredResponse),
    /// Same key, different request.
    Mismatch,
}

pub struct IdempotencyStore {
    journal: Journal<StoredResponse>,
    entries: Mutex<HashMap<(String, String), StoredResponse>>,
}

impl IdempotencyStore {
    pub fn open(dir: &Path) -> io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        let journal = Journal::new(dir.join("idempotency.jsonl"));
        let entries = journal
            .read_all()?
            .into_iter()
            .map(|r: StoredResponse| ((r.route.clone(), r.key.clone()), r))
            .collect();
        Ok(Self { journal, entries: Mutex::new(entries) })
    }

    pub fn lookup(&self, route: &str, key: &str, fingerprint: &str) -> Lookup {
        let entries = self.entries.lock().expect("idempotency lock poisoned");
        match entries.get(&(route.to_owned(), key.to_owned())) {
            None => Lookup::Miss,
            Some(r) if r.fingerprint == fingerprint => Lookup::Replay(r.clone()),
            Some(_) => Lookup::Mismatch,
        }
    }

    pub fn record(&self, response: StoredResponse) -> io::Result<()> {
        self.journal.append(&response)?;
        let mut entries = self.entries.lock().expect("idempotency lock poisoned");
        entries.insert((response.route.clone(), response.key.clone()), response);
        Ok(())
    }
}
