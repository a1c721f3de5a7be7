use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::failure::Failure;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| Failure::io(&dir, e))?;
    tmp.write_all(bytes).map_err(|e| Failure::io(path, e))?;
    tmp.persist(path).map_err(|e| Failure::io(path, e.error))?;
    Ok(())
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileHash {
    pub path: String,
    pub sha256: String,
}

impl FileHash {
    pub fn of(path: &Path, bytes: &[u8]) -> Self {
        FileHash { path: path.display().to_string(), sha256: sha256_hex(bytes) }
    }
}

/// Everything needed to rerun a command and check its output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub kind: String,
    pub version: String,
    pub command: String,
    /// Arguments after the program name, without the global flags.
    pub args: Vec<String>,
    pub seed: u64,
    pub precision_bits: u32,
    pub inputs: Vec<FileHash>,
    pub output: FileHash,
}

/// Reads an input file, recording its hash.
pub fn read_input(path: &Path, inputs: &mut Vec<FileHash>) -> Result<Vec<u8>, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::io(path, e))?;
    inputs.push(FileHash::of(path, &bytes));
    Ok(bytes)
}

/// Drops `--out`, `--seed` and `--precision-bits` (with their values) from raw arguments.
pub fn strip_globals(args: &[String]) -> Vec<String> {
    const GLOBALS: [&str; 3] = ["--out", "--seed", "--precision-bits"];
    let mut out = Vec::new();
    let mut skip = false;
    for a in args {
        if skip {
            skip = false;
            continue;
        }
        if GLOBALS.contains(&a.as_str()) {
            skip = true;
            continue;
        }
        if GLOBALS.iter().any(|g| a.starts_with(&format!("{g}="))) {
            continue;
        }
        out.push(a.clone());
    }
    out
}
