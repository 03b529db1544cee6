//! Run directories and their manifests.
//!
//! Each invocation writes into a fresh `run-NNNN` directory under `--out`
//! and finishes by writing `manifest.json` there. Existing run directories
//! are never touched again, so every output belongs to exactly one
//! manifest.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<String>,
    pub seed: u64,
    pub tool_version: String,
    /// Paths relative to the run directory.
    pub outputs: Vec<String>,
    pub wall_time_s: f64,
    pub exit_code: i32,
}

/// Creates the next unused `run-NNNN` directory.
pub fn new_run_dir(out: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(out)?;
    for i in 1..100_000 {
        let dir = out.join(format!("run-{i:04}"));
        match std::fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(Error::Config(format!("no free run directory under {}", out.display())))
}

pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<PathBuf> {
    let path = dir.join(MANIFEST_FILE);
    if path.exists() {
        return Err(Error::Config(format!("{} already has a manifest", dir.display())));
    }
    std::fs::write(&path, serde_json::to_string_pretty(manifest)? + "\n")?;
    Ok(path)
}

pub fn read_manifest(dir: &Path) -> Result<RunManifest> {
    Ok(serde_json::from_str(&std::fs::read_to_string(dir.join(MANIFEST_FILE))?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_dirs_are_fresh_and_manifests_write_once() {
        let tmp = tempfile::tempdir().unwrap();
        let a = new_run_dir(tmp.path()).unwrap();
        let b = new_run_dir(tmp.path()).unwrap();
        assert_ne!(a, b);
        let m = RunManifest {
            command: "verify tools".into(),
            config_path: None,
            seed: 1,
            tool_version: "0".into(),
            outputs: vec!["summary.json".into()],
            wall_time_s: 0.0,
            exit_code: 0,
        };
        write_manifest(&a, &m).unwrap();
        assert!(write_manifest(&a, &m).is_err());
        assert_eq!(read_manifest(&a).unwrap(), m);
    }
}
