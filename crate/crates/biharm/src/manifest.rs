//! Run manifests and atomic output writes.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cert::ROUNDING_MODE;
use crate::config::Config;
use crate::error::Result;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name with every default made explicit;
    /// passing them back to the CLI replays the run.
    pub argv: Vec<String>,
    pub parameters: Value,
    pub config: Config,
    pub tool_version: String,
    pub rounding_mode: String,
    pub wall_ms: u64,
    pub outputs: Vec<String>,
    pub summary: Value,
}

impl RunManifest {
    pub fn new(command: &str, argv: Vec<String>, parameters: Value, config: Config) -> Self {
        RunManifest {
            command: command.to_string(),
            argv,
            parameters,
            config,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            rounding_mode: ROUNDING_MODE.to_string(),
            wall_ms: 0,
            outputs: Vec::new(),
            summary: Value::Null,
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&std::fs::read(path)?)?)
    }
}

/// Output directory that records every file written through it.
pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root)?;
        Ok(OutDir { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    /// Writes `name` via a temporary file and a rename.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&self.root.join(name), bytes)?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    /// Lists the outputs in the manifest and writes it last.
    pub fn finish(mut self, mut manifest: RunManifest) -> Result<RunManifest> {
        manifest.outputs = std::mem::take(&mut self.written);
        let mut bytes = serde_json::to_vec_pretty(&manifest)?;
        bytes.push(b'\n');
        write_atomic(&self.root.join(MANIFEST_FILE), &bytes)?;
        Ok(manifest)
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
