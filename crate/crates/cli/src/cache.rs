//! Directory-backed certificate cache.
//!
//! Entries are JSON files named by the SHA-256 of the cache key. Writes go
//! to a temporary file in the same directory and are renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use boundaryk::ktheory::{CertificateKey, CertificateRecord, CertificateStore};

pub struct DirectoryStore {
    dir: PathBuf,
}

impl DirectoryStore {
    pub fn open(dir: &Path) -> std::io::Result<DirectoryStore> {
        fs::create_dir_all(dir)?;
        Ok(DirectoryStore { dir: dir.to_path_buf() })
    }

    pub fn path_for(&self, key: &CertificateKey) -> PathBuf {
        let text = format!("{}\n{}\n{}\n{}\n{}", key.d, key.relation, key.max_depth, key.operation, key.input);
        let digest = Sha256::digest(text.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.dir.join(format!("{}-{hex}.json", key.operation))
    }

    fn write(&self, key: &CertificateKey, record: &CertificateRecord) -> std::io::Result<()> {
        let body = serde_json::to_vec_pretty(record).map_err(std::io::Error::other)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(&body)?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.path_for(key)).map_err(|e| e.error)?;
        Ok(())
    }
}

impl CertificateStore for DirectoryStore {
    fn load(&self, key: &CertificateKey) -> Option<CertificateRecord> {
        let body = fs::read(self.path_for(key)).ok()?;
        serde_json::from_slice(&body).ok()
    }

    fn store(&self, key: &CertificateKey, record: &CertificateRecord) {
        if let Err(e) = self.write(key, record) {
            eprintln!("warning: could not write cache entry: {e}");
        }
    }
}
