use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rbkit::ExperimentConfig;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{io_error, CliError, CliResult};

pub const CONFIG_FILE: &str = "config.json";
pub const FIDELITIES_FILE: &str = "fidelities.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const FIT_FILE: &str = "fit.json";
pub const CURVE_FILE: &str = "curve.csv";
pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub rng_seed: u64,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub files: Vec<FileEntry>,
}

pub fn now_unix() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of the canonical JSON form, so JSON and TOML inputs hash alike.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    sha256_hex(serde_json::to_string(cfg).expect("config serializes").as_bytes())
}

pub fn read_config(path: &Path) -> CliResult<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let is_toml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
    let cfg: ExperimentConfig = if is_toml {
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
    } else {
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
    };
    Ok(cfg)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Writes files into a directory and records them for the manifest.
pub struct RunWriter {
    dir: PathBuf,
    files: Vec<FileEntry>,
}

impl RunWriter {
    pub fn create(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| io_error(&path, e))?;
        self.files.retain(|f| f.name != name);
        self.files.push(FileEntry {
            name: name.to_string(),
            sha256: sha256_hex(contents.as_bytes()),
            bytes: contents.len() as u64,
        });
        Ok(())
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }
}
