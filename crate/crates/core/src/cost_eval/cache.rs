// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{EvalError, EvalResult, EvalSource};

/// One journal line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheRecord {
    /// Hex form of the 64-bit key.
    pub key: String,
    pub serialization: String,
    pub delay: f64,
    pub area: f64,
    pub source: EvalSource,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    pub entries: usize,
}

struct Entry {
    serialization: String,
    result: EvalResult,
}

#[derive(Default)]
struct Inner {
    map: HashMap<u64, Entry>,
    hits: u64,
    misses: u64,
    journal: Option<File>,
}

/// Evaluation results keyed by the hash of a design's canonical text.
///
/// The full text is kept next to each result so a hash collision is
/// reported instead of silently returning another design's numbers. When
/// backed by a journal, every new entry is appended as a JSON line and
/// reopening the journal rebuilds the map.
pub struct CacheStore {
    inner: Mutex<Inner>,
    path: Option<PathBuf>,
}

impl CacheStore {
    pub fn in_memory() -> Self {
        CacheStore {
            inner: Mutex::new(Inner::default()),
            path: None,
        }
    }

    /// Opens (or creates) a journal-backed cache, replaying existing lines.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, EvalError> {
        let path = path.as_ref().to_path_buf();
        let mut inner = Inner::default();
        if path.exists() {
            let reader = BufReader::new(File::open(&path)?);
            for (lineno, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: CacheRecord = serde_json::from_str(&line)
                    .map_err(|e| EvalError::Parse(format!("journal line {}: {e}", lineno + 1)))?;
                let key = u64::from_str_radix(&rec.key, 16)
                    .map_err(|e| EvalError::Parse(format!("journal line {}: {e}", lineno + 1)))?;
                let result = EvalResult::new(rec.delay, rec.area, rec.source);
                insert_checked(&mut inner.map, key, &rec.serialization, result)?;
            }
        }
        inner.journal = Some(OpenOptions::new().create(true).append(true).open(&path)?);
        Ok(CacheStore {
            inner: Mutex::new(inner),
            path: Some(path),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Inner> {
        self.inner.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Stored result for `key`, counting a hit or a miss.
    pub fn get(&self, key: u64, serialization: &str) -> Result<Option<EvalResult>, EvalError> {
        let mut inner = self.lock();
        let found = match inner.map.get(&key) {
            Some(e) if e.serialization != serialization => {
                return Err(EvalError::KeyCollision { key })
            }
            Some(e) => Some(e.result),
            None => None,
        };
        if found.is_some() {
            inner.hits += 1;
        } else {
            inner.misses += 1;
        }
        Ok(found)
    }

    /// Stores a result. Re-putting an identical result is a no-op; a
    /// different result under the same key is an error.
    pub fn put(&self, key: u64, serialization: &str, result: EvalResult) -> Result<(), EvalError> {
        let mut inner = self.lock();
        if !insert_checked(&mut inner.map, key, serialization, result)? {
            return Ok(());
        }
        if let Some(journal) = inner.journal.as_mut() {
            let rec = CacheRecord {
                key: format!("{key:016x}"),
                serialization: serialization.to_string(),
                delay: result.delay,
                area: result.area,
                source: result.source,
            };
            let line = serde_json::to_string(&rec).map_err(|e| EvalError::Parse(e.to_string()))?;
            writeln!(journal, "{line}")?;
            journal.flush()?;
        }
        Ok(())
    }

    pub fn stats(&self) -> CacheStats {
        let inner = self.lock();
        CacheStats {
            hits: inner.hits,
            misses: inner.misses,
            entries: inner.map.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.lock().map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Snapshot of every entry, ordered by key.
    pub fn entries(&self) -> Vec<(u64, String, EvalResult)> {
        let inner = self.lock();
        let mut out: Vec<_> = inner
            .map
            .iter()
            .map(|(k, e)| (*k, e.serialization.clone(), e.result))
            .collect();
        out.sort_by_key(|e| e.0);
        out
    }
}

/// Returns whether a new entry was created.
fn insert_checked(
    map: &mut HashMap<u64, Entry>,
    key: u64,
    serialization: &str,
    result: EvalResult,
) -> Result<bool, EvalError> {
    match map.get(&key) {
        Some(e) if e.serialization != serialization => Err(EvalError::KeyCollision { key }),
        Some(e) if !e.result.same_metrics(&result) => Err(EvalError::ConflictingValue { key }),
        Some(_) => Ok(false),
        None => {
            map.insert(
                key,
                Entry {
                    serialization: serialization.to_string(),
                    result,
                },
            );
            Ok(true)
        }
    }
}
