//! JSON run manifest: configuration echo, timing and file digests.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::harness::GridSpec;
use crate::io::config::parse_config_str;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the manifest's directory.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    /// Seconds since the Unix epoch.
    pub started: u64,
    pub finished: u64,
    pub workers: usize,
    /// TOML configuration that reproduces the run; empty when unknown.
    pub config: String,
    pub files: Vec<FileEntry>,
}

pub fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn file_digest(path: &Path) -> Result<(u64, String)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok((bytes.len() as u64, hex::encode(Sha256::digest(&bytes))))
}

impl RunManifest {
    pub fn new(command: &str, config: String, workers: usize, started: u64) -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            started,
            finished: started,
            workers,
            config,
            files: Vec::new(),
        }
    }

    /// Digests `files` (which must live under `dir`) and writes the
    /// manifest there. Returns the manifest path.
    pub fn finish(mut self, dir: &Path, files: &[PathBuf]) -> Result<PathBuf> {
        self.files = files
            .iter()
            .map(|p| {
                let (bytes, sha256) = file_digest(p)?;
                let rel = p.strip_prefix(dir).unwrap_or(p);
                Ok(FileEntry {
                    path: rel.to_string_lossy().into_owned(),
                    bytes,
                    sha256,
                })
            })
            .collect::<Result<_>>()?;
        self.finished = unix_now().max(self.started);
        let path = dir.join(MANIFEST_NAME);
        let text = serde_json::to_string_pretty(&self).expect("manifest serializes") + "\n";
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    pub fn spec(&self, origin: &Path) -> Result<(GridSpec, bool)> {
        if self.config.is_empty() {
            return Err(Error::Config(format!(
                "{} records no configuration",
                origin.display()
            )));
        }
        parse_config_str(&self.config, origin)
    }

    /// Entries whose file is missing or whose digest differs.
    pub fn verify(&self, dir: &Path) -> Vec<String> {
        self.files
            .iter()
            .filter(|f| !matches!(file_digest(&dir.join(&f.path)), Ok((b, d)) if b == f.bytes && d == f.sha256))
            .map(|f| f.path.clone())
            .collect()
    }
}

pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::config::config_echo;

    #[test]
    fn digests_and_spec_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        std::fs::write(&a, "abc").unwrap();
        let spec = GridSpec::published().desk_scale();
        let m = RunManifest::new("grid", config_echo(&spec, false), 4, unix_now());
        let path = m.finish(dir.path(), std::slice::from_ref(&a)).unwrap();

        let back = read_manifest(&path).unwrap();
        assert_eq!(back.files.len(), 1);
        assert_eq!(back.files[0].path, "a.csv");
        assert_eq!(back.files[0].bytes, 3);
        assert_eq!(
            back.files[0].sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_eq!(back.spec(&path).unwrap(), (spec, false));
        assert!(back.verify(dir.path()).is_empty());

        std::fs::write(&a, "abd").unwrap();
        assert_eq!(back.verify(dir.path()), vec!["a.csv".to_string()]);
    }
}
