use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;

use crate::CliError;

/// Collects report files in memory and writes each one atomically.
pub struct OutputDir {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

impl OutputDir {
    pub fn new(dir: &Path) -> Self {
        OutputDir {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    pub fn add(&mut self, name: impl Into<String>, bytes: impl Into<Vec<u8>>) {
        self.files.push((name.into(), bytes.into()));
    }

    pub fn add_json<T: Serialize>(&mut self, name: impl Into<String>, value: &T) {
        let mut bytes = serde_json::to_vec_pretty(value).expect("reports serialize");
        bytes.push(b'\n');
        self.add(name, bytes);
    }

    pub fn names(&self) -> Vec<String> {
        self.files.iter().map(|(n, _)| n.clone()).collect()
    }

    /// Temp file in the target directory, then rename over the final name.
    pub fn commit(self) -> Result<(), CliError> {
        let werr = |path: &Path, source| CliError::Write {
            path: path.to_path_buf(),
            source,
        };
        fs::create_dir_all(&self.dir).map_err(|e| werr(&self.dir, e))?;
        for (name, bytes) in self.files {
            let target = self.dir.join(&name);
            let mut tmp = NamedTempFile::new_in(&self.dir).map_err(|e| werr(&target, e))?;
            tmp.write_all(&bytes).map_err(|e| werr(&target, e))?;
            #[cfg(unix)]
            {
                use std::os::unix::fs::PermissionsExt;
                tmp.as_file()
                    .set_permissions(fs::Permissions::from_mode(0o644))
                    .map_err(|e| werr(&target, e))?;
            }
            tmp.as_file().sync_all().map_err(|e| werr(&target, e))?;
            tmp.persist(&target).map_err(|e| werr(&target, e.error))?;
        }
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct InputHash {
    pub path: String,
    pub sha256: String,
}

pub fn hash_input(path: &Path) -> Result<InputHash, CliError> {
    let bytes = fs::read(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(InputHash {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub parameters: serde_json::Value,
    pub seeds: Vec<u64>,
    pub inputs: Vec<InputHash>,
    pub outputs: Vec<String>,
    /// Only field that differs between identical runs.
    pub created_at: String,
}

impl RunManifest {
    pub fn new(
        command: &'static str,
        parameters: serde_json::Value,
        seeds: Vec<u64>,
        inputs: Vec<InputHash>,
    ) -> Self {
        RunManifest {
            tool: "airdrop-forge",
            version: env!("CARGO_PKG_VERSION"),
            command,
            parameters,
            seeds,
            inputs,
            outputs: Vec::new(),
            created_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    /// Adds the manifest itself as the last output.
    pub fn attach(mut self, out: &mut OutputDir) {
        self.outputs = out.names();
        out.add_json("run_manifest.json", &self);
    }
}
