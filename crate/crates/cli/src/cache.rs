//! On-disk cache of [`ResultRecord`]s keyed by a hash of their parameters.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::record::{emit, parse, Params, ResultRecord, SCHEMA_VERSION};

#[derive(Serialize)]
struct KeyFields<'a> {
    schema_version: u32,
    quantity: &'a str,
    params: &'a Params,
}

/// Hex SHA-256 of the canonical JSON of `(schema_version, quantity, params)`.
pub fn cache_key(quantity: &str, params: &Params) -> String {
    let canonical = serde_json::to_string(&KeyFields {
        schema_version: SCHEMA_VERSION,
        quantity,
        params,
    })
    .expect("parameters serialize");
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// Cached record, or `None` on a miss. Unreadable or mismatched entries
    /// count as misses.
    pub fn get(&self, quantity: &str, params: &Params) -> Option<ResultRecord> {
        let path = self.path(&cache_key(quantity, params));
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return None,
            Err(e) => {
                log::warn!("cache entry {} unreadable: {e}", path.display());
                return None;
            }
        };
        match parse::<ResultRecord>(&text) {
            Ok(r)
                if r.schema_version == SCHEMA_VERSION
                    && r.quantity == quantity
                    && &r.params == params =>
            {
                Some(r)
            }
            Ok(_) => {
                log::warn!(
                    "cache entry {} does not match its key; ignoring",
                    path.display()
                );
                None
            }
            Err(e) => {
                log::warn!("cache entry {} is corrupt ({e}); ignoring", path.display());
                None
            }
        }
    }

    /// Writes to a temporary file in the cache directory, then renames it
    /// over the entry.
    pub fn put(&self, record: &ResultRecord) -> std::io::Result<()> {
        let path = self.path(&cache_key(&record.quantity, &record.params));
        let text = emit(record).map_err(std::io::Error::other)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(text.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok(())
    }

    /// Cached record for `(quantity, params)`, computing and storing it on a
    /// miss. Failed writes are logged, not fatal.
    pub fn get_or_compute<E>(
        &self,
        quantity: &str,
        params: Params,
        compute: impl FnOnce(Params) -> Result<ResultRecord, E>,
    ) -> Result<ResultRecord, E> {
        if let Some(r) = self.get(quantity, &params) {
            log::debug!("cache hit for {quantity}");
            return Ok(r);
        }
        let r = compute(params)?;
        if let Err(e) = self.put(&r) {
            log::warn!("could not write cache entry in {}: {e}", self.dir.display());
        }
        Ok(r)
    }
}

/// Looks up through `cache` when there is one.
pub fn cached<E>(
    cache: Option<&Cache>,
    quantity: &str,
    params: Params,
    compute: impl FnOnce(Params) -> Result<ResultRecord, E>,
) -> Result<ResultRecord, E> {
    match cache {
        Some(c) => c.get_or_compute(quantity, params, compute),
        None => compute(params),
    }
}
