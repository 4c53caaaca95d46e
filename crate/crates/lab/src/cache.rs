//! On-disk cache of eigensystems.
//!
//! File layout, all integers and floats little-endian:
//!
//! | bytes | field |
//! |-------|-------|
//! | 8     | magic `LDOSEIG\0` |
//! | 4     | format version (u32) |
//! | 8     | N (u64) |
//! | 8     | k, IEEE-754 bits (u64) |
//! | 32    | SHA-256 of the canonical key string |
//! | 8     | body length in bytes (u64) |
//! | body  | N phases (f64), then N² complex entries (re, im) column-major |
//! | 32    | SHA-256 of the body |
//!
//! Files are written to a temporary name and renamed into place. A file that
//! fails any check is reported and recomputed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ldos_core::linalg::CMatrix;
use ldos_core::maps::{PerturbationSpec, Window};
use ldos_core::quantum::{
    build_propagator, eigendecompose, EigenSystem, QuantizationKnobs, QuantumError,
};
use ldos_core::Complex64;
use log::warn;
use sha2::{Digest, Sha256};
use thiserror::Error;

const MAGIC: &[u8; 8] = b"LDOSEIG\0";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 8 + 4 + 8 + 8 + 32 + 8;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache io error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("corrupt cache entry: {0}")]
    Corrupt(&'static str),
}

/// Canonical text identifying an eigensystem.
pub fn canonical_key(n: usize, spec: &PerturbationSpec, knobs: &QuantizationKnobs) -> String {
    let window = match spec.window() {
        Window::Global => "global".to_string(),
        Window::Local { q0, beta } => {
            format!("local:{:016x}:{:016x}", q0.to_bits(), beta.to_bits())
        }
    };
    format!(
        "n={n};k={:016x};kind={:?};window={window};mode={:?};kick_offset={:016x}",
        spec.strength().to_bits(),
        spec.kind(),
        spec.mode(),
        knobs.kick_offset.to_bits()
    )
}

fn key_hash(key: &str) -> [u8; 32] {
    Sha256::digest(key.as_bytes()).into()
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn encode(n: usize, k: f64, key: &str, eig: &EigenSystem) -> Vec<u8> {
    let mut body = Vec::with_capacity(8 * (n + 2 * n * n));
    for &p in eig.phases() {
        body.extend_from_slice(&p.to_le_bytes());
    }
    for z in eig.vectors().as_slice() {
        body.extend_from_slice(&z.re.to_le_bytes());
        body.extend_from_slice(&z.im.to_le_bytes());
    }
    let mut out = Vec::with_capacity(HEADER_LEN + body.len() + 32);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(n as u64).to_le_bytes());
    out.extend_from_slice(&k.to_bits().to_le_bytes());
    out.extend_from_slice(&key_hash(key));
    out.extend_from_slice(&(body.len() as u64).to_le_bytes());
    let digest: [u8; 32] = Sha256::digest(&body).into();
    out.extend_from_slice(&body);
    out.extend_from_slice(&digest);
    out
}

fn read_u64(bytes: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(bytes[at..at + 8].try_into().expect("slice of length 8"))
}

pub fn decode(bytes: &[u8], n: usize, k: f64, key: &str) -> Result<EigenSystem, CacheError> {
    if bytes.len() < HEADER_LEN + 32 {
        return Err(CacheError::Corrupt("truncated header"));
    }
    if &bytes[..8] != MAGIC {
        return Err(CacheError::Corrupt("bad magic"));
    }
    if u32::from_le_bytes(bytes[8..12].try_into().expect("slice of length 4")) != VERSION {
        return Err(CacheError::Corrupt("unknown version"));
    }
    if read_u64(bytes, 12) != n as u64
        || read_u64(bytes, 20) != k.to_bits()
        || bytes[28..60] != key_hash(key)
    {
        return Err(CacheError::Corrupt(
            "header does not match the requested key",
        ));
    }
    let body_len = read_u64(bytes, 60) as usize;
    let expected = 8 * (n + 2 * n * n);
    if body_len != expected || bytes.len() != HEADER_LEN + body_len + 32 {
        return Err(CacheError::Corrupt("length mismatch"));
    }
    let body = &bytes[HEADER_LEN..HEADER_LEN + body_len];
    let digest: [u8; 32] = Sha256::digest(body).into();
    if digest[..] != bytes[HEADER_LEN + body_len..] {
        return Err(CacheError::Corrupt("checksum mismatch"));
    }
    let f = |i: usize| {
        f64::from_le_bytes(
            body[8 * i..8 * i + 8]
                .try_into()
                .expect("slice of length 8"),
        )
    };
    let phases: Vec<f64> = (0..n).map(f).collect();
    let data: Vec<Complex64> = (0..n * n)
        .map(|i| Complex64::new(f(n + 2 * i), f(n + 2 * i + 1)))
        .collect();
    let vectors =
        CMatrix::from_column_major(n, data).map_err(|_| CacheError::Corrupt("bad matrix"))?;
    EigenSystem::from_parts(phases, vectors)
        .map_err(|_| CacheError::Corrupt("inconsistent eigensystem"))
}

/// Directory of cached eigensystems.
#[derive(Debug, Clone)]
pub struct EigenCache {
    dir: PathBuf,
}

impl EigenCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self, CacheError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|source| CacheError::Io {
            path: dir.clone(),
            source,
        })?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{}.eig", hex(&key_hash(key))))
    }

    pub fn load(
        &self,
        n: usize,
        spec: &PerturbationSpec,
        knobs: &QuantizationKnobs,
    ) -> Option<EigenSystem> {
        let key = canonical_key(n, spec, knobs);
        let path = self.path_for(&key);
        let bytes = fs::read(&path).ok()?;
        match decode(&bytes, n, spec.strength(), &key) {
            Ok(e) => Some(e),
            Err(e) => {
                warn!(
                    "discarding cache entry {}: {e}; recomputing",
                    path.display()
                );
                None
            }
        }
    }

    pub fn store(
        &self,
        n: usize,
        spec: &PerturbationSpec,
        knobs: &QuantizationKnobs,
        eig: &EigenSystem,
    ) -> Result<(), CacheError> {
        let key = canonical_key(n, spec, knobs);
        let path = self.path_for(&key);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        let io = |source| CacheError::Io {
            path: tmp.clone(),
            source,
        };
        {
            let mut f = fs::File::create(&tmp).map_err(io)?;
            f.write_all(&encode(n, spec.strength(), &key, eig))
                .map_err(io)?;
            f.sync_all().map_err(io)?;
        }
        fs::rename(&tmp, &path).map_err(|source| CacheError::Io { path, source })
    }
}

/// Eigensystem of the propagator for `spec`, from `cache` when possible.
pub fn eigensystem(
    n: usize,
    spec: &PerturbationSpec,
    knobs: &QuantizationKnobs,
    cache: Option<&EigenCache>,
) -> Result<EigenSystem, QuantumError> {
    if let Some(e) = cache.and_then(|c| c.load(n, spec, knobs)) {
        return Ok(e);
    }
    let e = eigendecompose(&build_propagator(n, spec, *knobs)?)?;
    if let Some(c) = cache {
        if let Err(err) = c.store(n, spec, knobs, &e) {
            warn!("could not write cache entry: {err}");
        }
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ldos_core::maps::ShearKind;

    #[test]
    fn round_trip_and_corruption() {
        let spec = PerturbationSpec::global(ShearKind::MomentumShear, 0.03).unwrap();
        let knobs = QuantizationKnobs::default();
        let e = eigensystem(16, &spec, &knobs, None).unwrap();
        let key = canonical_key(16, &spec, &knobs);
        let bytes = encode(16, 0.03, &key, &e);
        assert_eq!(decode(&bytes, 16, 0.03, &key).unwrap(), e);
        let mut flipped = bytes.clone();
        flipped[HEADER_LEN + 5] ^= 1;
        assert!(matches!(
            decode(&flipped, 16, 0.03, &key),
            Err(CacheError::Corrupt("checksum mismatch"))
        ));
        assert!(decode(&bytes[..bytes.len() - 1], 16, 0.03, &key).is_err());
        assert!(decode(&bytes, 16, 0.031, &key).is_err());
        let other = canonical_key(16, &spec.with_strength(0.04), &knobs);
        assert_ne!(key, other);
    }
}
