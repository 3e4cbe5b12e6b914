use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::canonical::sha256_hex;

/// Immutable blob plane addressed by SHA-256: `blobs/<first2>/<checksum>`.
#[derive(Debug, Clone)]
pub struct BlobStore {
    root: PathBuf,
}

impl BlobStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn path_for(&self, checksum: &str) -> PathBuf {
        let prefix = checksum.get(..2).unwrap_or("xx");
        self.root.join(prefix).join(checksum)
    }

    /// Stores `bytes` and returns their checksum. Existing blobs are never rewritten.
    pub fn put(&self, bytes: &[u8]) -> io::Result<String> {
        let checksum = sha256_hex(bytes);
        let path = self.path_for(&checksum);
        if path.exists() {
            return Ok(checksum);
        }
        let dir = path.parent().expect("blob path has a parent");
        fs::create_dir_all(dir)?;
        let tmp = dir.join(format!(".{checksum}.tmp"));
        fs::write(&tmp, bytes)?;
        fs::rename(&tmp, &path)?;
        Ok(checksum)
    }

    /// Raw bytes as found on disk, without verification.
    pub fn get(&self, checksum: &str) -> io::Result<Vec<u8>> {
        fs::read(self.path_for(checksum))
    }

    /// Recomputes the digest of the stored bytes. `None` if the blob is missing.
    pub fn digest_of(&self, checksum: &str) -> io::Result<Option<String>> {
        match fs::read(self.path_for(checksum)) {
            Ok(bytes) => Ok(Some(sha256_hex(&bytes))),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_and_dedup() {
        let dir = tempfile::tempdir().unwrap();
        let blobs = BlobStore::new(dir.path());
        let c = blobs.put(b"hello world\n").unwrap();
        let expected = dir.path().join("a9").join(&c);
        assert_eq!(blobs.path_for(&c), expected);
        assert!(expected.exists());
        assert_eq!(blobs.put(b"hello world\n").unwrap(), c);
        assert_eq!(blobs.get(&c).unwrap(), b"hello world\n");
        assert_eq!(blobs.digest_of(&c).unwrap(), Some(c.clone()));
        assert_eq!(blobs.digest_of(&"0".repeat(64)).unwrap(), None);
    }
}
