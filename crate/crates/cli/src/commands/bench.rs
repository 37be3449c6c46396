//! `bench`: single-threaded throughput with a per-stage breakdown.

use std::time::{Duration, Instant};

use serde::Serialize;
use usv_core::audio::load_wav;
use usv_core::synth::{synthesize, Chirp, SynthSpec};
use usv_core::{pipeline, AudioRecording, PipelineConfig};

use crate::args::BenchArgs;
use crate::error::{CliError, Outcome};
use crate::files::{find_wavs, load_config, write_file};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageTime {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub recordings: usize,
    pub audio_seconds: f64,
    pub wall_seconds: f64,
    pub seconds_per_audio_second: f64,
    /// Pipeline order; `load` is WAV decoding.
    pub stages: Vec<StageTime>,
}

/// Synthetic benchmark audio: one 50 ms sweep every half second.
pub fn synthetic_recording(seconds: f64) -> Result<AudioRecording, CliError> {
    let chirps = (0..)
        .map(|i| 0.1 + 0.5 * f64::from(i))
        .take_while(|s| s + 0.05 <= seconds)
        .map(|start| Chirp { start, duration: 0.05, f0: 50_000.0, f1: 70_000.0, amplitude: 0.5 })
        .collect();
    let spec = SynthSpec { duration_s: seconds, noise_amplitude: 0.02, seed: 0, chirps };
    Ok(synthesize(&spec, "bench")?.0)
}

struct Tally {
    stages: Vec<(String, Duration)>,
}

impl Tally {
    fn add(&mut self, name: &str, d: Duration) {
        match self.stages.iter_mut().find(|(n, _)| n == name) {
            Some((_, t)) => *t += d,
            None => self.stages.push((name.to_string(), d)),
        }
    }
}

/// Times the pipeline over `recordings`, one after another on this thread.
pub fn bench<'a>(
    recordings: impl IntoIterator<Item = Result<(AudioRecording, Duration), CliError>> + 'a,
    cfg: &PipelineConfig,
) -> Result<BenchReport, CliError> {
    let mut tally = Tally { stages: vec![("load".to_string(), Duration::ZERO)] };
    let (mut audio, mut wall, mut n) = (0.0, Duration::ZERO, 0);
    for item in recordings {
        let (rec, load) = item?;
        tally.add("load", load);
        let t = Instant::now();
        let out = pipeline::run(&rec, "bench", cfg)?;
        wall += load + t.elapsed();
        for (stage, d) in out.timings {
            tally.add(stage.name(), d);
        }
        audio += rec.duration_seconds();
        n += 1;
    }
    if n == 0 {
        return Err(CliError::Failed("nothing to benchmark".into()));
    }
    let wall = wall.as_secs_f64();
    Ok(BenchReport {
        recordings: n,
        audio_seconds: audio,
        wall_seconds: wall,
        seconds_per_audio_second: wall / audio,
        stages: tally
            .stages
            .into_iter()
            .map(|(stage, d)| StageTime { stage, seconds: d.as_secs_f64() })
            .collect(),
    })
}

pub fn run(args: &BenchArgs) -> Result<Outcome, CliError> {
    let cfg = load_config(args.config.as_deref())?;
    let report = match &args.input {
        Some(input) => {
            let wavs = find_wavs(input)?;
            let channel = cfg.channel;
            bench(
                wavs.into_iter().map(move |p| {
                    let t = Instant::now();
                    let rec = load_wav(&p, channel)?;
                    Ok((rec, t.elapsed()))
                }),
                &cfg,
            )?
        }
        None => {
            if !(args.seconds > 0.0) {
                return Err(CliError::Usage("--seconds must be positive".into()));
            }
            let rec = synthetic_recording(args.seconds)?;
            bench([Ok((rec, Duration::ZERO))], &cfg)?
        }
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    println!("{json}");
    if let Some(out) = &args.output {
        write_file(out, json + "\n")?;
    }
    Ok(Outcome::Success)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_sum_bounded_by_wall() {
        let rec = synthetic_recording(2.0).unwrap();
        let r = bench([Ok((rec.clone(), Duration::ZERO)), Ok((rec, Duration::ZERO))], &PipelineConfig::default()).unwrap();
        assert_eq!(r.recordings, 2);
        assert!((r.audio_seconds - 4.0).abs() < 1e-12);
        let sum: f64 = r.stages.iter().map(|s| s.seconds).sum();
        assert!(sum <= r.wall_seconds + 1e-9, "{sum} > {}", r.wall_seconds);
        assert_eq!(r.seconds_per_audio_second, r.wall_seconds / r.audio_seconds);
        let names: Vec<_> = r.stages.iter().map(|s| s.stage.as_str()).collect();
        assert_eq!(names[0], "load");
        assert!(names.contains(&"clahe") && names.contains(&"otsu_2"));
    }
}
