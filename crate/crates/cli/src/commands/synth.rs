//! `synth`: synthetic recording plus ground-truth CSV.

use std::path::{Path, PathBuf};

use usv_core::annotations::write_annotations;
use usv_core::audio::{write_wav, SampleFormat};
use usv_core::synth::{synthesize, SynthSpec};

use super::detect::recording_id;
use crate::args::{SynthArgs, WavFormat};
use crate::error::{CliError, Outcome};
use crate::files::{create_dir, read_file};

pub fn truth_path(wav: &Path) -> PathBuf {
    wav.with_file_name(format!("{}.truth.csv", recording_id(wav)))
}

fn spec_from_args(args: &SynthArgs) -> Result<SynthSpec, CliError> {
    if let Some(p) = &args.spec {
        return serde_json::from_str(&read_file(p)?).map_err(|e| CliError::Config(format!("{}: {e}", p.display())));
    }
    let d = SynthSpec::default();
    Ok(SynthSpec {
        duration_s: args.duration.unwrap_or(d.duration_s),
        noise_amplitude: args.noise.unwrap_or(d.noise_amplitude),
        seed: args.seed.unwrap_or(d.seed),
        chirps: args.chirp.clone(),
    })
}

pub fn run(args: &SynthArgs) -> Result<Outcome, CliError> {
    let spec = spec_from_args(args)?;
    spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let id = recording_id(&args.output);
    let (rec, truth) = synthesize(&spec, &id)?;
    if let Some(parent) = args.output.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    let format = match args.format {
        WavFormat::Pcm16 => SampleFormat::Pcm16,
        WavFormat::Float32 => SampleFormat::Float32,
    };
    write_wav(&args.output, &rec, format)?;
    write_annotations(&truth, truth_path(&args.output))?;
    Ok(Outcome::Success)
}
