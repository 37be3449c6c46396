//! Synthetic test recordings: linear chirps over white Gaussian noise.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::annotations::{AnnotationSet, UsvAnnotation};
use crate::audio::AudioRecording;
use crate::Error;

pub const SYNTH_RATE: u32 = 250_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Chirp {
    pub start: f64,
    pub duration: f64,
    pub f0: f64,
    pub f1: f64,
    pub amplitude: f64,
}

impl Chirp {
    /// Parses `start,duration,f0,f1,amplitude`.
    pub fn parse(s: &str) -> Result<Self, String> {
        let v: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
            .collect::<Result<_, _>>()?;
        match v.as_slice() {
            &[start, duration, f0, f1, amplitude] => Ok(Self { start, duration, f0, f1, amplitude }),
            _ => Err(format!("expected 5 comma-separated numbers, got {}", v.len())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub duration_s: f64,
    /// Standard deviation of the white noise floor.
    pub noise_amplitude: f64,
    pub seed: u64,
    pub chirps: Vec<Chirp>,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            duration_s: 10.0,
            noise_amplitude: 0.01,
            seed: 0,
            chirps: Vec::new(),
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.duration_s > 0.0) {
            return bad("duration_s must be positive".into());
        }
        if !(self.noise_amplitude >= 0.0) {
            return bad("noise_amplitude must be non-negative".into());
        }
        let nyquist = f64::from(SYNTH_RATE) / 2.0;
        for (i, c) in self.chirps.iter().enumerate() {
            if !(c.start >= 0.0 && c.duration > 0.0 && c.start + c.duration <= self.duration_s) {
                return bad(format!("chirp {i} does not fit inside the recording"));
            }
            if !(c.f0 > 0.0 && c.f1 > 0.0 && c.f0 < nyquist && c.f1 < nyquist) {
                return bad(format!("chirp {i} frequencies must lie in (0, {nyquist}) Hz"));
            }
        }
        Ok(())
    }
}

/// Renders the recording and its ground truth. Samples are clipped to `[-1, 1]`.
pub fn synthesize(spec: &SynthSpec, recording_id: &str) -> Result<(AudioRecording, AnnotationSet), Error> {
    spec.validate()?;
    let rate = f64::from(SYNTH_RATE);
    let n = (spec.duration_s * rate).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise = Normal::new(0.0, spec.noise_amplitude).map_err(|e| Error::Config(e.to_string()))?;
    let mut samples: Vec<f64> = (0..n).map(|_| noise.sample(&mut rng)).collect();

    for c in &spec.chirps {
        let first = (c.start * rate).ceil() as usize;
        let last = (((c.start + c.duration) * rate).ceil() as usize).min(n);
        let sweep = (c.f1 - c.f0) / c.duration;
        for (i, s) in samples.iter_mut().enumerate().take(last).skip(first) {
            let tau = i as f64 / rate - c.start;
            let phase = 2.0 * PI * (c.f0 * tau + 0.5 * sweep * tau * tau);
            *s += c.amplitude * phase.sin();
        }
    }
    for s in &mut samples {
        *s = s.clamp(-1.0, 1.0);
    }

    let truth = spec
        .chirps
        .iter()
        .map(|c| {
            let mut a = UsvAnnotation::new(recording_id, c.start, c.start + c.duration, c.f0.min(c.f1), c.f0.max(c.f1));
            if c.f0 == c.f1 {
                // constant tone: no band to report
                a.low = None;
                a.high = None;
            }
            a
        })
        .collect();
    let recording = AudioRecording::new(samples, SYNTH_RATE, recording_id)?;
    let truth = AnnotationSet::new(recording_id, Some(recording.duration_seconds()), truth)?;
    Ok((recording, truth))
}
