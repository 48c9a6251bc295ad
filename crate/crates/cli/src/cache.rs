//! On-disk cache of high-precision constants keyed by `(name, P)`.
//!
//! Each entry is a small JSON file holding the exact binary value as a hex
//! string plus a SHA-256 over the key and the value. Entries that fail to
//! parse or whose digest does not match are discarded with a warning.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rug::Float;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Serialize, Deserialize)]
struct Entry {
    name: String,
    precision: u32,
    value_bits: u32,
    value_hex: String,
    sha256: String,
}

fn digest(name: &str, precision: u32, value_bits: u32, value_hex: &str) -> String {
    let mut h = Sha256::new();
    h.update(format!("{name}\n{precision}\n{value_bits}\n{value_hex}").as_bytes());
    format!("{:x}", h.finalize())
}

pub struct Cache {
    dir: Option<PathBuf>,
    verify: bool,
    /// Keys whose cached value differed from a fresh computation.
    mismatches: Mutex<Vec<String>>,
}

impl Cache {
    /// `dir = None` disables caching.
    pub fn new(dir: Option<PathBuf>, verify: bool) -> Self {
        Cache {
            dir,
            verify,
            mismatches: Mutex::new(Vec::new()),
        }
    }

    pub fn mismatches(&self) -> Vec<String> {
        self.mismatches.lock().expect("not poisoned").clone()
    }

    fn path(&self, name: &str, precision: u32) -> Option<PathBuf> {
        let safe: String = name
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                    c
                } else {
                    '_'
                }
            })
            .collect();
        self.dir
            .as_ref()
            .map(|d| d.join(format!("{safe}-p{precision}.json")))
    }

    /// The cached value, or `None` on a miss or a discarded entry.
    pub fn load(&self, name: &str, precision: u32) -> Option<Float> {
        let path = self.path(name, precision)?;
        let text = fs::read_to_string(&path).ok()?;
        match parse_entry(&text, name, precision) {
            Ok(v) => Some(v),
            Err(why) => {
                eprintln!("warning: discarding cache entry {}: {why}", path.display());
                let _ = fs::remove_file(&path);
                None
            }
        }
    }

    /// Writes through a temporary file in the same directory and renames it,
    /// so readers never see a partial entry.
    pub fn store(&self, name: &str, precision: u32, value: &Float) -> std::io::Result<()> {
        let Some(path) = self.path(name, precision) else {
            return Ok(());
        };
        let dir = path.parent().unwrap_or(Path::new("."));
        fs::create_dir_all(dir)?;
        let value_hex = value.to_string_radix(16, None);
        let entry = Entry {
            name: name.into(),
            precision,
            value_bits: value.prec(),
            sha256: digest(name, precision, value.prec(), &value_hex),
            value_hex,
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(
            serde_json::to_string(&entry)
                .expect("entry serializes")
                .as_bytes(),
        )?;
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok(())
    }

    /// Loads `(name, precision)` or computes and stores it. With `verify` set,
    /// a hit is recomputed and any difference is recorded and overwritten.
    pub fn get_or_compute<E>(
        &self,
        name: &str,
        precision: u32,
        compute: impl FnOnce() -> Result<Float, E>,
    ) -> Result<Float, E> {
        let cached = self.load(name, precision);
        if let (Some(v), false) = (&cached, self.verify) {
            return Ok(v.clone());
        }
        let fresh = compute()?;
        if let Some(v) = cached {
            if v == fresh && v.prec() == fresh.prec() {
                return Ok(v);
            }
            eprintln!("warning: cached {name} at {precision} bits differs from recomputation");
            self.mismatches
                .lock()
                .expect("not poisoned")
                .push(format!("{name}@{precision}"));
        }
        if let Err(e) = self.store(name, precision, &fresh) {
            eprintln!("warning: could not write cache entry for {name}: {e}");
        }
        Ok(fresh)
    }
}

fn parse_entry(text: &str, name: &str, precision: u32) -> Result<Float, String> {
    let e: Entry = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if e.name != name || e.precision != precision {
        return Err(format!("entry is for {}@{}", e.name, e.precision));
    }
    if digest(&e.name, e.precision, e.value_bits, &e.value_hex) != e.sha256 {
        return Err("checksum mismatch".into());
    }
    let parsed = Float::parse_radix(&e.value_hex, 16).map_err(|e| e.to_string())?;
    let v = Float::with_val(e.value_bits, parsed);
    if v.to_string_radix(16, None) != e.value_hex {
        return Err("value does not round-trip".into());
    }
    Ok(v)
}
