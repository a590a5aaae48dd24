use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::{CliResult, Globals};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Record of one run. Written before any computation and rewritten with the
/// elapsed time when the run finishes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest<C> {
    pub command: String,
    pub artifact_version: String,
    pub config_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub base_seed: u64,
    pub threads: Option<usize>,
    /// Config after merging config file and flags; accepted back by `--config`.
    pub resolved: C,
    pub started_unix_ms: u64,
    pub wall_clock_seconds: Option<f64>,
}

pub struct ManifestWriter<C> {
    manifest: RunManifest<C>,
    path: PathBuf,
    start: Instant,
}

impl<C: Serialize> ManifestWriter<C> {
    pub fn begin(command: &str, globals: &Globals, base_seed: u64, resolved: C) -> CliResult<Self> {
        fs::create_dir_all(&globals.out)
            .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", globals.out.display())))?;
        let started_unix_ms = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0);
        let writer = Self {
            manifest: RunManifest {
                command: command.to_string(),
                artifact_version: env!("CARGO_PKG_VERSION").to_string(),
                config_path: globals.config.clone(),
                output_dir: globals.out.clone(),
                base_seed,
                threads: globals.threads,
                resolved,
                started_unix_ms,
                wall_clock_seconds: None,
            },
            path: globals.out.join(MANIFEST_FILE),
            start: Instant::now(),
        };
        writer.write()?;
        Ok(writer)
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.manifest.wall_clock_seconds = Some(self.start.elapsed().as_secs_f64());
        self.write()
    }

    fn write(&self) -> CliResult<()> {
        let json = serde_json::to_string_pretty(&self.manifest).map_err(CliError::runtime)?;
        fs::write(&self.path, json + "\n")
            .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", self.path.display())))
    }
}

/// Reads a config file for `command`. A manifest of a run of the same
/// command is accepted and its `resolved` section used.
pub fn load_config<C: DeserializeOwned>(path: &Path, command: &str) -> CliResult<C> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("config {} is not valid JSON: {e}", path.display())))?;
    let body = match (value.get("command"), value.get("resolved")) {
        (Some(cmd), Some(resolved)) => {
            if cmd.as_str() != Some(command) {
                return Err(CliError::usage(format!(
                    "{} is a manifest of `{cmd}`, not of `{command}`",
                    path.display()
                )));
            }
            resolved.clone()
        }
        _ => value,
    };
    serde_json::from_value(body).map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))
}
