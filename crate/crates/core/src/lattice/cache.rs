//! On-disk cache of enumerated shells and coefficient tables.
//!
//! Every file is JSON lines: a header object followed by body lines. The
//! header stores the SHA-256 of the body and the id of the lattice whose Gram
//! matrix produced it; both are re-checked on every read.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{GramLattice, LatticeVector};
use crate::error::{Error, Result};

pub const CACHE_DIR_ENV: &str = "POINCARE_CACHE_DIR";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct CacheHeader {
    pub kind: String,
    pub lattice_id: String,
    pub key: serde_json::Value,
    pub lines: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct CacheEntryReport {
    pub file: String,
    pub kind: String,
    pub lines: u64,
    pub ok: bool,
    pub problem: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

fn body_hash(lines: &[String]) -> String {
    let mut h = Sha256::new();
    for l in lines {
        h.update(l.as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

fn key_hash(key: &serde_json::Value) -> String {
    hex::encode(Sha256::digest(key.to_string().as_bytes()))[..16].to_string()
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// Directory from the environment override, else `./.poincare-cache`.
    pub fn from_env_or(dir: Option<&Path>) -> Self {
        match dir {
            Some(d) => Self::new(d),
            None => match std::env::var_os(CACHE_DIR_ENV) {
                Some(d) => Self::new(d),
                None => Self::new(".poincare-cache"),
            },
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, kind: &str, lattice: &GramLattice, key: &serde_json::Value) -> PathBuf {
        self.dir
            .join(format!("{kind}-{}-{}.jsonl", &lattice.id().hex()[..16], key_hash(key)))
    }

    pub fn store(
        &self,
        kind: &str,
        lattice: &GramLattice,
        key: serde_json::Value,
        lines: &[String],
    ) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let header = CacheHeader {
            kind: kind.to_string(),
            lattice_id: lattice.id().hex(),
            key: key.clone(),
            lines: lines.len() as u64,
            sha256: body_hash(lines),
        };
        let path = self.path_for(kind, lattice, &key);
        let tmp = path.with_extension("tmp");
        {
            let mut f = std::io::BufWriter::new(fs::File::create(&tmp)?);
            writeln!(f, "{}", serde_json::to_string(&header)?)?;
            for l in lines {
                writeln!(f, "{l}")?;
            }
            f.flush()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    fn read_file(path: &Path) -> Result<(CacheHeader, Vec<String>)> {
        let f = BufReader::new(fs::File::open(path)?);
        let mut it = f.lines();
        let first = it
            .next()
            .ok_or_else(|| Error::Integrity(format!("{}: empty cache file", path.display())))??;
        let header: CacheHeader = serde_json::from_str(&first)
            .map_err(|e| Error::Integrity(format!("{}: bad header: {e}", path.display())))?;
        let body: Vec<String> = it.collect::<std::io::Result<_>>()?;
        Ok((header, body))
    }

    fn check(path: &Path, header: &CacheHeader, body: &[String]) -> Result<()> {
        if header.lines != body.len() as u64 {
            return Err(Error::Integrity(format!("{}: line count mismatch", path.display())));
        }
        if header.sha256 != body_hash(body) {
            return Err(Error::Integrity(format!("{}: checksum mismatch", path.display())));
        }
        Ok(())
    }

    /// Loads an entry; a missing file is `None`, a corrupt one is an error.
    pub fn load(
        &self,
        kind: &str,
        lattice: &GramLattice,
        key: &serde_json::Value,
    ) -> Result<Option<Vec<String>>> {
        let path = self.path_for(kind, lattice, key);
        if !path.exists() {
            return Ok(None);
        }
        let (header, body) = Self::read_file(&path)?;
        Self::check(&path, &header, &body)?;
        if header.lattice_id != lattice.id().hex() || &header.key != key || header.kind != kind {
            return Err(Error::Integrity(format!("{}: key or lattice hash mismatch", path.display())));
        }
        Ok(Some(body))
    }

    pub fn store_shell(&self, lattice: &GramLattice, norm: i64, vectors: &[LatticeVector]) -> Result<PathBuf> {
        let lines: Vec<String> = vectors
            .iter()
            .map(|v| serde_json::to_string(&v.coords))
            .collect::<std::result::Result<_, _>>()?;
        self.store("shell", lattice, serde_json::json!({ "norm": norm }), &lines)
    }

    pub fn load_shell(&self, lattice: &GramLattice, norm: i64) -> Result<Option<Vec<LatticeVector>>> {
        let Some(body) = self.load("shell", lattice, &serde_json::json!({ "norm": norm }))? else {
            return Ok(None);
        };
        let mut out = Vec::with_capacity(body.len());
        for l in body {
            let coords: Vec<i64> = serde_json::from_str(&l)?;
            let v = lattice.vector(coords)?;
            if lattice.inner_coords(&v.coords, &v.coords) != norm {
                return Err(Error::Integrity("cached shell vector has the wrong norm".into()));
            }
            out.push(v);
        }
        Ok(Some(out))
    }

    fn entries(&self) -> Result<Vec<PathBuf>> {
        if !self.dir.exists() {
            return Ok(Vec::new());
        }
        let mut v: Vec<PathBuf> = fs::read_dir(&self.dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "jsonl"))
            .collect();
        v.sort();
        Ok(v)
    }

    /// Re-hashes every entry.
    pub fn verify(&self) -> Result<Vec<CacheEntryReport>> {
        let mut out = Vec::new();
        for p in self.entries()? {
            let file = p.file_name().unwrap().to_string_lossy().into_owned();
            let report = match Self::read_file(&p) {
                Ok((h, body)) => {
                    let problem = Self::check(&p, &h, &body).err().map(|e| e.to_string());
                    CacheEntryReport { file, kind: h.kind, lines: body.len() as u64, ok: problem.is_none(), problem }
                }
                Err(e) => CacheEntryReport { file, kind: "unknown".into(), lines: 0, ok: false, problem: Some(e.to_string()) },
            };
            out.push(report);
        }
        Ok(out)
    }

    pub fn list(&self) -> Result<Vec<CacheEntryReport>> {
        self.verify()
    }

    pub fn clear(&self) -> Result<usize> {
        let entries = self.entries()?;
        for p in &entries {
            fs::remove_file(p)?;
        }
        Ok(entries.len())
    }
}
