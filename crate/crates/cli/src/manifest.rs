use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Record of one command run: parameters, file digests and timing.
pub struct Manifest {
    command: String,
    parameters: BTreeMap<String, Value>,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
    started_unix: u64,
    clock: Instant,
}

#[derive(Serialize)]
struct FileDigest {
    path: PathBuf,
    sha256: String,
    bytes: u64,
}

#[derive(Serialize)]
struct ManifestFile<'a> {
    command: &'a str,
    parameters: &'a BTreeMap<String, Value>,
    inputs: &'a [FileDigest],
    outputs: &'a [FileDigest],
    started_unix: u64,
    elapsed_ms: u128,
}

fn digest(path: &Path) -> Result<FileDigest> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(FileDigest { path: path.to_path_buf(), sha256: hex::encode(Sha256::digest(&bytes)), bytes: bytes.len() as u64 })
}

impl Manifest {
    pub fn start(command: &str) -> Self {
        Manifest {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            started_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            clock: Instant::now(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).unwrap_or(Value::Null);
        self.parameters.insert(key.to_string(), value);
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        self.inputs.push(digest(path)?);
        Ok(())
    }

    pub fn output(&mut self, path: &Path) -> Result<()> {
        self.outputs.push(digest(path)?);
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let file = ManifestFile {
            command: &self.command,
            parameters: &self.parameters,
            inputs: &self.inputs,
            outputs: &self.outputs,
            started_unix: self.started_unix,
            elapsed_ms: self.clock.elapsed().as_millis(),
        };
        let mut text = serde_json::to_string_pretty(&file)?;
        text.push('\n');
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }

    /// Writes `<out>.manifest.json` next to a single-file output.
    pub fn write_beside(&self, out: &Path) -> Result<()> {
        let mut name = out.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        self.write(&out.with_file_name(name))
    }
}
