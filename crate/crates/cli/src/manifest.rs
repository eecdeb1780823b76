//! Run manifests: plain-text key/value reports written next to decomposition outputs.
//!
//! One entry per line, `key = value`, in a fixed order. Blank lines and
//! lines starting with `#` are ignored when parsing. Floating-point values
//! use the shortest representation that parses back to the same `f64`, so
//! a manifest fully determines the run. Lists are comma separated.
//!
//! Keys written by `tubal decompose`:
//!
//! | key | meaning |
//! |-----|---------|
//! | `tool` | `tubal <version>` |
//! | `input` | input path as given |
//! | `input_kind` | `tensor` or `frames` |
//! | `input_sha256` | digest of the tensor file, or of the frame files' digests in order |
//! | `normalize` | `none` or `unit` (frames only, recorded for tensors too) |
//! | `shape` | `n1xn2xn3` |
//! | `block` | `b1xb2` |
//! | `tau_scale` | scale used when no explicit `tau0` is given |
//! | `tau0_explicit` | explicit initial threshold or `none` |
//! | `tau0` | initial threshold actually used |
//! | `mu`, `eta0`, `eps`, `max_iters` | iteration parameters |
//! | `threads` | worker threads for the block updates |
//! | `frames_clamp` | `clip` or `rescale`, used for frame outputs |
//! | `iterations`, `converged` | outcome of the stopping rule |
//! | `history` | relative change after each iteration |
//! | `thresholds` | threshold applied at each iteration |
//! | `block_count`, `block_rank_min`, `block_rank_max`, `block_rank_mean` | tubal ranks of final blocks |
//! | `block_ranks` | tubal rank of every block in row-major grid order |
//! | `wall_seconds` | elapsed time of the decomposition |
//! | `output_l`, `output_s` | written tensor files |
//! | `output_l_frames`, `output_s_frames` | frame directories, frames input only |

use std::fmt::{self, Display};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::io::{frame_paths, IoError, Result as IoResult};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunManifest {
    entries: Vec<(String, String)>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ManifestError {
    #[error("line {0}: expected `key = value`")]
    Syntax(usize),
    #[error("missing key `{0}`")]
    Missing(String),
    #[error("key `{key}`: cannot parse `{value}`")]
    BadValue { key: String, value: String },
}

impl RunManifest {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends an entry, replacing an existing one with the same key in place.
    pub fn set(&mut self, key: &str, value: impl Display) {
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str, ManifestError> {
        self.get(key).ok_or_else(|| ManifestError::Missing(key.to_string()))
    }

    pub fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<T, ManifestError> {
        let value = self.require(key)?;
        value.parse().map_err(|_| ManifestError::BadValue { key: key.to_string(), value: value.to_string() })
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn parse(text: &str) -> Result<Self, ManifestError> {
        let mut m = Self::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ManifestError::Syntax(n + 1))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(ManifestError::Syntax(n + 1));
            }
            m.set(k, v.trim());
        }
        Ok(m)
    }
}

impl Display for RunManifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

/// Comma-separated list with round-trip float formatting.
pub fn float_list(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(",")
}

pub fn parse_float_list(s: &str) -> Option<Vec<f64>> {
    if s.is_empty() {
        return Some(Vec::new());
    }
    s.split(',').map(|x| x.trim().parse().ok()).collect()
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

/// Digest of a tensor file, or of a frame directory as the digest of its
/// frame files' digests in load order.
pub fn input_digest(path: &Path) -> IoResult<String> {
    let read = |p: &Path| std::fs::read(p).map_err(|source| IoError::Io { path: p.to_path_buf(), source });
    if path.is_dir() {
        let mut outer = Sha256::new();
        for p in frame_paths(path)? {
            outer.update(Sha256::digest(read(&p)?));
        }
        Ok(hex(&outer.finalize()))
    } else {
        Ok(sha256_hex(&read(path)?))
    }
}
