//! `detect`: annotate every WAV under a path.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use usv_core::annotations::write_annotations;
use usv_core::audio::load_wav;
use usv_core::{pipeline, PipelineConfig};

use crate::args::DetectArgs;
use crate::error::{CliError, Outcome};
use crate::files::{config_hash, create_dir, find_wavs, write_file};

pub const MANIFEST_NAME: &str = "run.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileRecord {
    pub path: String,
    pub recording_id: String,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regions: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_rate: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_s: Option<f64>,
    pub seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub config_sha256: String,
    pub config: PipelineConfig,
    pub input: String,
    pub output: String,
    pub jobs: usize,
    pub started_unix: f64,
    pub wall_seconds: f64,
    pub succeeded: usize,
    pub failed: usize,
    pub files: Vec<FileRecord>,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = crate::files::read_file(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))
    }
}

pub fn recording_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Where the CSV for `wav` goes: the input's relative directory layout is
/// mirrored under `output`.
fn output_path(input: &Path, output: &Path, wav: &Path) -> PathBuf {
    let rel_dir = wav
        .parent()
        .and_then(|p| p.strip_prefix(input).ok())
        .unwrap_or_else(|| Path::new(""));
    output.join(rel_dir).join(format!("{}.annotations.csv", recording_id(wav)))
}

fn process(wav: &Path, out_csv: &Path, cfg: &PipelineConfig) -> Result<FileRecord, CliError> {
    let t = Instant::now();
    let id = recording_id(wav);
    let rec = load_wav(wav, cfg.channel)?;
    let out = pipeline::run(&rec, &id, cfg)?;
    if let Some(parent) = out_csv.parent() {
        create_dir(parent)?;
    }
    write_annotations(&out.annotations, out_csv)?;
    Ok(FileRecord {
        path: wav.display().to_string(),
        recording_id: id,
        ok: true,
        output: Some(out_csv.display().to_string()),
        annotations: Some(out.annotations.len()),
        regions: Some(out.n_regions),
        sample_rate: Some(rec.sample_rate()),
        duration_s: Some(rec.duration_seconds()),
        seconds: t.elapsed().as_secs_f64(),
        error: None,
    })
}

pub fn run(args: &DetectArgs) -> Result<Outcome, CliError> {
    let cfg = crate::files::load_config(args.config.as_deref())?;
    let jobs = match args.jobs {
        Some(0) => return Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(j) => j,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let wavs = find_wavs(&args.input)?;
    if wavs.is_empty() {
        log::warn!("no .wav files under {}", args.input.display());
    }
    create_dir(&args.output)?;

    let started = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64());
    let t = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Failed(e.to_string()))?;
    let input_root = if args.input.is_dir() { args.input.as_path() } else { args.input.parent().unwrap_or(Path::new("")) };
    let files: Vec<FileRecord> = pool.install(|| {
        wavs.par_iter()
            .map(|wav| {
                let start = Instant::now();
                let out_csv = output_path(input_root, &args.output, wav);
                process(wav, &out_csv, &cfg).unwrap_or_else(|e| {
                    log::error!("{}: {e}", wav.display());
                    FileRecord {
                        path: wav.display().to_string(),
                        recording_id: recording_id(wav),
                        ok: false,
                        output: None,
                        annotations: None,
                        regions: None,
                        sample_rate: None,
                        duration_s: None,
                        seconds: start.elapsed().as_secs_f64(),
                        error: Some(e.to_string()),
                    }
                })
            })
            .collect()
    });

    let failed = files.iter().filter(|f| !f.ok).count();
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_sha256: config_hash(&cfg),
        config: cfg,
        input: args.input.display().to_string(),
        output: args.output.display().to_string(),
        jobs,
        started_unix: started,
        wall_seconds: t.elapsed().as_secs_f64(),
        succeeded: files.len() - failed,
        failed,
        files,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(&args.output.join(MANIFEST_NAME), json + "\n")?;
    log::info!("{} recordings, {failed} failed", manifest.files.len());
    Ok(Outcome::from_failures(failed))
}
