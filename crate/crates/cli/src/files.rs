//! Input discovery and shared config loading.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use usv_core::PipelineConfig;

use crate::error::CliError;

/// `.wav` files under `input` (or `input` itself), sorted.
pub fn find_wavs(input: &Path) -> Result<Vec<PathBuf>, CliError> {
    find_files(input, |p| has_extension(p, "wav"))
}

pub fn has_extension(p: &Path, ext: &str) -> bool {
    p.extension().is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

/// Files under `input` accepted by `keep`, recursively and sorted. A plain
/// file is returned as is.
pub fn find_files(input: &Path, keep: impl Fn(&Path) -> bool) -> Result<Vec<PathBuf>, CliError> {
    let meta = std::fs::metadata(input).map_err(|e| CliError::io(input, e))?;
    if meta.is_file() {
        return Ok(vec![input.to_path_buf()]);
    }
    let mut out = Vec::new();
    let mut dirs = vec![input.to_path_buf()];
    while let Some(dir) = dirs.pop() {
        for entry in std::fs::read_dir(&dir).map_err(|e| CliError::io(&dir, e))? {
            let entry = entry.map_err(|e| CliError::io(&dir, e))?;
            let path = entry.path();
            let ty = entry.file_type().map_err(|e| CliError::io(&path, e))?;
            if ty.is_dir() {
                dirs.push(path);
            } else if keep(&path) {
                out.push(path);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Loads `path`, or the defaults when absent.
pub fn load_config(path: Option<&Path>) -> Result<PipelineConfig, CliError> {
    match path {
        Some(p) => PipelineConfig::load(p).map_err(|e| CliError::Config(e.to_string())),
        None => Ok(PipelineConfig::default()),
    }
}

/// SHA-256 of the effective configuration's JSON form.
pub fn config_hash(cfg: &PipelineConfig) -> String {
    hex::encode(Sha256::digest(cfg.to_json().as_bytes()))
}

pub fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}
