//! In-memory LRU cache and the on-disk store of per-trace L-values.

use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

struct Entry<K, V> {
    key: K,
    value: V,
    bytes: usize,
    last_used: AtomicU64,
}

/// Size-bounded cache: lookups share a read lock, insertion takes the write
/// lock and evicts least recently used entries until the budget holds.
pub struct LruCache<K, V> {
    budget: usize,
    clock: AtomicU64,
    entries: RwLock<Vec<Entry<K, V>>>,
}

impl<K: PartialEq + Copy, V: Clone> LruCache<K, V> {
    pub fn new(budget_bytes: usize) -> Self {
        LruCache { budget: budget_bytes, clock: AtomicU64::new(0), entries: RwLock::new(Vec::new()) }
    }

    fn tick(&self) -> u64 {
        self.clock.fetch_add(1, Ordering::Relaxed) + 1
    }

    pub fn get(&self, key: &K) -> Option<V> {
        self.find(|k| k == *key)
    }

    /// First entry whose key satisfies `pred`.
    pub fn find(&self, pred: impl Fn(K) -> bool) -> Option<V> {
        let entries = self.entries.read().unwrap_or_else(|e| e.into_inner());
        let e = entries.iter().find(|e| pred(e.key))?;
        e.last_used.store(self.tick(), Ordering::Relaxed);
        Some(e.value.clone())
    }

    pub fn insert(&self, key: K, value: V, bytes: usize) {
        let mut entries = self.entries.write().unwrap_or_else(|e| e.into_inner());
        entries.retain(|e| e.key != key);
        let mut used: usize = entries.iter().map(|e| e.bytes).sum();
        while used + bytes > self.budget && !entries.is_empty() {
            let oldest = entries
                .iter()
                .enumerate()
                .min_by_key(|(_, e)| e.last_used.load(Ordering::Relaxed))
                .map(|(i, _)| i)
                .expect("non-empty");
            used -= entries.swap_remove(oldest).bytes;
        }
        if bytes <= self.budget {
            entries.push(Entry { key, value, bytes, last_used: AtomicU64::new(self.tick()) });
        }
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn bytes(&self) -> usize {
        self.entries.read().unwrap_or_else(|e| e.into_inner()).iter().map(|e| e.bytes).sum()
    }
}

const MAGIC: &[u8; 8] = b"ZLVAL\x00\x01\x00";
const HEADER: u64 = 24;
const RECORD: u64 = 16;

/// Append-only file of `L_{n^2-4}(1/2 + it)` for `n = first, first + 1, ...`.
///
/// Layout: 8-byte magic, `t` as little-endian f64 bits, `first` as u64, then
/// one `(re, im)` pair of little-endian f64 per trace. A torn final record is
/// dropped on open.
pub struct LValueStore {
    path: PathBuf,
    t: f64,
    first: u64,
    values: Vec<Complex64>,
}

impl LValueStore {
    pub const FIRST_TRACE: u64 = 3;

    pub fn file_name(t: f64) -> String {
        format!("lvalues_t{:016x}.bin", t.to_bits())
    }

    /// Opens (or creates) the store for `t` inside `dir`.
    pub fn open(dir: &Path, t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::Domain(format!("cache key t = {t} is not finite")));
        }
        fs::create_dir_all(dir)?;
        let path = dir.join(Self::file_name(t));
        if !path.exists() {
            let mut f = File::create(&path)?;
            f.write_all(MAGIC)?;
            f.write_all(&t.to_bits().to_le_bytes())?;
            f.write_all(&Self::FIRST_TRACE.to_le_bytes())?;
            return Ok(LValueStore { path, t, first: Self::FIRST_TRACE, values: Vec::new() });
        }
        Self::load(path, t)
    }

    fn load(path: PathBuf, t: f64) -> Result<Self> {
        let mut f = File::open(&path)?;
        let mut header = [0u8; HEADER as usize];
        f.read_exact(&mut header).map_err(|_| invalid(&path, "truncated header"))?;
        if &header[..8] != MAGIC {
            return Err(invalid(&path, "bad magic"));
        }
        let stored_t = f64::from_bits(u64::from_le_bytes(header[8..16].try_into().expect("8 bytes")));
        if stored_t.to_bits() != t.to_bits() {
            return Err(invalid(&path, "t does not match"));
        }
        let first = u64::from_le_bytes(header[16..24].try_into().expect("8 bytes"));
        if first != Self::FIRST_TRACE {
            return Err(invalid(&path, "unexpected first trace"));
        }
        let mut body = Vec::new();
        f.read_to_end(&mut body)?;
        let whole = body.len() / RECORD as usize;
        let mut values = Vec::with_capacity(whole);
        for (i, rec) in body.chunks_exact(RECORD as usize).enumerate() {
            let re = f64::from_le_bytes(rec[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(rec[8..].try_into().expect("8 bytes"));
            if !re.is_finite() || !im.is_finite() {
                return Err(invalid(&path, &format!("non-finite value at n = {}", first + i as u64)));
            }
            values.push(Complex64::new(re, im));
        }
        if body.len() % RECORD as usize != 0 {
            OpenOptions::new().write(true).open(&path)?.set_len(HEADER + whole as u64 * RECORD)?;
        }
        Ok(LValueStore { path, t, first, values })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Largest trace stored, or `FIRST_TRACE - 1` when empty.
    pub fn max_trace(&self) -> u64 {
        self.first + self.values.len() as u64 - 1
    }

    pub fn get(&self, n: u64) -> Option<Complex64> {
        n.checked_sub(self.first).and_then(|i| self.values.get(i as usize)).copied()
    }

    /// Values for `FIRST_TRACE..=max_trace()`.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Appends values for the traces following `max_trace()`.
    pub fn append(&mut self, more: &[Complex64]) -> Result<()> {
        if more.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("cached L-value"));
        }
        let mut f = OpenOptions::new().write(true).open(&self.path)?;
        f.seek(SeekFrom::Start(HEADER + self.values.len() as u64 * RECORD))?;
        let mut w = BufWriter::new(f);
        for z in more {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        w.flush()?;
        self.values.extend_from_slice(more);
        Ok(())
    }
}

fn invalid(path: &Path, why: &str) -> Error {
    Error::Validation(format!("{}: {why}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lru_evicts_least_recent() {
        let c: LruCache<u32, u32> = LruCache::new(30);
        c.insert(1, 10, 10);
        c.insert(2, 20, 10);
        c.insert(3, 30, 10);
        assert_eq!(c.get(&1), Some(10));
        c.insert(4, 40, 10);
        assert_eq!(c.get(&2), None);
        assert_eq!(c.get(&1), Some(10));
        assert_eq!(c.len(), 3);
        assert!(c.bytes() <= 30);
        c.insert(5, 50, 100);
        assert_eq!(c.get(&5), None);
    }

    #[test]
    fn store_round_trip_and_torn_record() {
        let dir = std::env::temp_dir().join(format!("zlv-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        let mut s = LValueStore::open(&dir, 0.0).unwrap();
        assert_eq!(s.max_trace(), 2);
        s.append(&[Complex64::new(1.5, 0.0), Complex64::new(-2.0, 0.25)]).unwrap();
        drop(s);
        let path = dir.join(LValueStore::file_name(0.0));
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(&[1, 2, 3]).unwrap();
        drop(f);
        let mut s = LValueStore::open(&dir, 0.0).unwrap();
        assert_eq!(s.max_trace(), 4);
        assert_eq!(s.get(4), Some(Complex64::new(-2.0, 0.25)));
        s.append(&[Complex64::new(7.0, 0.0)]).unwrap();
        let mut s = LValueStore::open(&dir, 0.0).unwrap();
        assert!(s.append(&[Complex64::new(f64::NAN, 0.0)]).is_err());
        assert_eq!(s.get(5), Some(Complex64::new(7.0, 0.0)));
        assert_eq!(s.get(2), None);
        assert!(LValueStore::open(&dir, 0.5).unwrap().values().is_empty());
        fs::write(&path, b"garbage-header-xxxxxxxxxxxx").unwrap();
        assert!(LValueStore::open(&dir, 0.0).is_err());
        let _ = fs::remove_dir_all(&dir);
    }
}
