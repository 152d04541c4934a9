//! Content-addressed store of engine output.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use sha2::{Digest, Sha256};

use super::EngineSpec;
use crate::authoring::Document;

/// Environment variable overriding the cache root.
pub const CACHE_ENV: &str = "TEXGLYPH_CACHE";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheEntry {
    pub key: String,
    pub dvi_bytes: Vec<u8>,
    pub log_text: String,
    pub created_at: SystemTime,
}

/// A directory of `<key>.dvi` / `<key>.log` pairs. Writes go through a
/// temporary file and an atomic rename, so concurrent writers of the same
/// key are safe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cache {
    root: PathBuf,
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Cache { root: root.into() }
    }

    /// `$TEXGLYPH_CACHE`, else the user cache directory, else the system
    /// temporary directory.
    pub fn default_root() -> PathBuf {
        if let Some(p) = std::env::var_os(CACHE_ENV).filter(|p| !p.is_empty()) {
            return PathBuf::from(p);
        }
        if let Some(p) = std::env::var_os("XDG_CACHE_HOME").filter(|p| !p.is_empty()) {
            return PathBuf::from(p).join("texglyph");
        }
        if let Some(home) = std::env::var_os("HOME").filter(|p| !p.is_empty()) {
            return PathBuf::from(home).join(".cache").join("texglyph");
        }
        std::env::temp_dir().join("texglyph-cache")
    }

    pub fn from_env() -> Self {
        Cache::new(Self::default_root())
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Key over the document hash, engine name and engine version.
    pub fn key(doc: &Document, engine: &EngineSpec) -> String {
        let mut h = Sha256::new();
        for part in [&doc.content_hash, &engine.name, &engine.version] {
            h.update(part.as_bytes());
            h.update([0u8]);
        }
        hex::encode(h.finalize())
    }

    fn paths(&self, key: &str) -> (PathBuf, PathBuf) {
        (self.root.join(format!("{key}.dvi")), self.root.join(format!("{key}.log")))
    }

    pub fn get(&self, key: &str) -> Option<CacheEntry> {
        let (dvi, log) = self.paths(key);
        let dvi_bytes = fs::read(&dvi).ok()?;
        let created_at = fs::metadata(&dvi)
            .and_then(|m| m.modified())
            .unwrap_or(SystemTime::UNIX_EPOCH);
        let log_text = fs::read(&log)
            .map(|b| super::decode_log(&b))
            .unwrap_or_default();
        Some(CacheEntry {
            key: key.to_owned(),
            dvi_bytes,
            log_text,
            created_at,
        })
    }

    fn write_atomic(&self, path: &Path, bytes: &[u8]) -> io::Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.root)?;
        tmp.write_all(bytes)?;
        tmp.as_file().sync_all()?;
        tmp.persist(path).map_err(|e| e.error)?;
        Ok(())
    }

    /// Stores an entry. The log is written first so that a visible `.dvi`
    /// always has its log next to it.
    pub fn put(&self, key: &str, dvi_bytes: &[u8], log_text: &str) -> io::Result<()> {
        fs::create_dir_all(&self.root)?;
        let (dvi, log) = self.paths(key);
        self.write_atomic(&log, log_text.as_bytes())?;
        self.write_atomic(&dvi, dvi_bytes)
    }

    /// Removes everything under the root and returns the bytes freed. A
    /// missing root frees nothing.
    pub fn clean(&self) -> io::Result<u64> {
        let entries = match fs::read_dir(&self.root) {
            Ok(e) => e,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(e),
        };
        let mut freed = 0;
        for entry in entries {
            let path = entry?.path();
            freed += tree_size(&path);
            if path.is_dir() {
                fs::remove_dir_all(&path)?;
            } else {
                fs::remove_file(&path)?;
            }
        }
        Ok(freed)
    }
}

fn tree_size(path: &Path) -> u64 {
    match fs::symlink_metadata(path) {
        Ok(m) if m.is_dir() => fs::read_dir(path)
            .map(|rd| rd.flatten().map(|e| tree_size(&e.path())).sum())
            .unwrap_or(0),
        Ok(m) => m.len(),
        Err(_) => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn put_get_clean() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path().join("c"));
        assert_eq!(cache.clean().unwrap(), 0, "missing root");
        assert!(cache.get("k").is_none());
        cache.put("k", b"\xf7\x02", "log").unwrap();
        let e = cache.get("k").unwrap();
        assert_eq!(e.dvi_bytes, b"\xf7\x02");
        assert_eq!(e.log_text, "log");
        assert_eq!(cache.clean().unwrap(), 5);
        assert!(cache.get("k").is_none());
        assert_eq!(cache.clean().unwrap(), 0);
    }

    #[test]
    fn key_depends_on_engine_version() {
        let doc = crate::authoring::author(
            &"x".into(),
            &Default::default(),
            crate::dvi::DviFlavor::Xdv,
        )
        .unwrap();
        let a = EngineSpec::known("xelatex", "/a", "XeTeX 1").unwrap();
        let b = EngineSpec::known("xelatex", "/b", "XeTeX 2").unwrap();
        assert_ne!(Cache::key(&doc, &a), Cache::key(&doc, &b));
        let a2 = EngineSpec::known("xelatex", "/elsewhere", "XeTeX 1").unwrap();
        assert_eq!(Cache::key(&doc, &a), Cache::key(&doc, &a2));
    }
}
