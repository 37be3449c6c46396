//! Band-limited STFT magnitude spectrogram.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::audio::AudioRecording;
use crate::grid::Grid;

/// Offset added to magnitudes before taking the logarithm.
pub const DB_EPSILON: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum SpectrogramError {
    #[error("invalid spectrogram parameters: {0}")]
    InvalidParams(String),
    #[error("recording rate {actual} Hz does not match canonical rate {expected} Hz; resample first")]
    RateMismatch { expected: u32, actual: u32 },
    #[error("recording has {samples} samples, shorter than one {window}-sample window")]
    TooShort { samples: usize, window: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowFunction {
    Hann,
    Rectangular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MagnitudeScale {
    Decibel,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrogramParams {
    pub window_size: usize,
    pub hop: usize,
    pub canonical_rate: u32,
    pub band_low: f64,
    pub band_high: f64,
    pub window_function: WindowFunction,
    pub magnitude_scale: MagnitudeScale,
}

impl Default for SpectrogramParams {
    fn default() -> Self {
        Self {
            window_size: 2500,
            hop: 1250,
            canonical_rate: 250_000,
            band_low: 15_000.0,
            band_high: 115_000.0,
            window_function: WindowFunction::Hann,
            magnitude_scale: MagnitudeScale::Linear,
        }
    }
}

impl SpectrogramParams {
    pub fn validate(&self) -> Result<(), SpectrogramError> {
        let bad = |m: &str| Err(SpectrogramError::InvalidParams(m.to_string()));
        if self.window_size == 0 {
            return bad("window_size must be positive");
        }
        if self.hop == 0 || self.hop > self.window_size {
            return bad("hop must satisfy 0 < hop <= window_size");
        }
        if self.canonical_rate == 0 {
            return bad("canonical_rate must be positive");
        }
        if !(self.band_low >= 0.0 && self.band_low < self.band_high) {
            return bad("band_low must be non-negative and below band_high");
        }
        if self.band_high > f64::from(self.canonical_rate) / 2.0 {
            return bad("band_high must not exceed the Nyquist frequency");
        }
        if self.bin_range().is_empty() {
            return bad("no DFT bin falls inside the frequency band");
        }
        Ok(())
    }

    pub fn bin_hz(&self) -> f64 {
        f64::from(self.canonical_rate) / self.window_size as f64
    }

    /// Uncropped DFT bin indices inside `[band_low, band_high]`.
    pub fn bin_range(&self) -> std::ops::Range<usize> {
        let df = self.bin_hz();
        let lo = (self.band_low / df - 1e-9).ceil().max(0.0) as usize;
        let hi = (self.band_high / df + 1e-9).floor() as usize;
        lo..(hi + 1).max(lo)
    }

    pub fn n_frames(&self, n_samples: usize) -> usize {
        if n_samples < self.window_size {
            0
        } else {
            (n_samples - self.window_size) / self.hop + 1
        }
    }

    fn window(&self) -> Vec<f64> {
        let n = self.window_size;
        match self.window_function {
            WindowFunction::Rectangular => vec![1.0; n],
            // periodic Hann
            WindowFunction::Hann => (0..n)
                .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
                .collect(),
        }
    }
}

/// Affine pixel-to-physical maps shared by the spectrogram and every image
/// derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrogramAxes {
    pub first_bin: usize,
    pub n_bins: usize,
    pub n_frames: usize,
    pub bin_hz: f64,
    pub window_size: usize,
    pub hop: usize,
    pub rate: u32,
    pub band_low: f64,
    pub band_high: f64,
    pub duration: f64,
}

impl SpectrogramAxes {
    pub fn new(params: &SpectrogramParams, n_samples: usize) -> Self {
        let bins = params.bin_range();
        Self {
            first_bin: bins.start,
            n_bins: bins.len(),
            n_frames: params.n_frames(n_samples),
            bin_hz: params.bin_hz(),
            window_size: params.window_size,
            hop: params.hop,
            rate: params.canonical_rate,
            band_low: params.band_low,
            band_high: params.band_high,
            duration: n_samples as f64 / f64::from(params.canonical_rate),
        }
    }

    /// Center frequency of cropped row `bin`.
    pub fn freq_of_bin(&self, bin: usize) -> f64 {
        (self.first_bin + bin) as f64 * self.bin_hz
    }

    /// Time of the center of frame `frame`, in seconds.
    pub fn time_of_frame(&self, frame: usize) -> f64 {
        (frame * self.hop) as f64 / f64::from(self.rate) + self.half_window_seconds()
    }

    pub fn half_window_seconds(&self) -> f64 {
        self.window_size as f64 / (2.0 * f64::from(self.rate))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    /// `[n_bins x n_frames]`, low frequency in row 0.
    pub values: Grid<f64>,
    pub axes: SpectrogramAxes,
    pub params: SpectrogramParams,
}

impl Spectrogram {
    pub fn n_bins(&self) -> usize {
        self.values.rows()
    }

    pub fn n_frames(&self) -> usize {
        self.values.cols()
    }
}

pub fn compute_spectrogram(
    rec: &AudioRecording,
    params: &SpectrogramParams,
) -> Result<Spectrogram, SpectrogramError> {
    params.validate()?;
    if rec.sample_rate() != params.canonical_rate {
        return Err(SpectrogramError::RateMismatch {
            expected: params.canonical_rate,
            actual: rec.sample_rate(),
        });
    }
    let samples = rec.samples();
    if samples.len() < params.window_size {
        return Err(SpectrogramError::TooShort {
            samples: samples.len(),
            window: params.window_size,
        });
    }

    let axes = SpectrogramAxes::new(params, samples.len());
    let window = params.window();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(params.window_size);
    let mut buf = vec![Complex::new(0.0, 0.0); params.window_size];
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let decibel = params.magnitude_scale == MagnitudeScale::Decibel;
    // frame-major first, transposed once at the end
    let mut by_frame = vec![0.0; axes.n_bins * axes.n_frames];

    for (frame, out) in by_frame.chunks_exact_mut(axes.n_bins).enumerate() {
        let start = frame * params.hop;
        for ((b, &s), &w) in buf
            .iter_mut()
            .zip(&samples[start..start + params.window_size])
            .zip(&window)
        {
            *b = Complex::new(s * w, 0.0);
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for (o, c) in out.iter_mut().zip(&buf[axes.first_bin..axes.first_bin + axes.n_bins]) {
            let mag = (c.re * c.re + c.im * c.im).sqrt();
            *o = if decibel { 20.0 * (mag + DB_EPSILON).log10() } else { mag };
        }
    }
    let values = transpose(&by_frame, axes.n_frames, axes.n_bins);

    Ok(Spectrogram {
        values,
        axes,
        params: params.clone(),
    })
}

/// Blocked transpose of a row-major `rows x cols` buffer.
fn transpose(src: &[f64], rows: usize, cols: usize) -> Grid<f64> {
    const B: usize = 32;
    let mut dst = vec![0.0; src.len()];
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..cols).step_by(B) {
            for r in r0..(r0 + B).min(rows) {
                for c in c0..(c0 + B).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
    Grid::from_vec(cols, rows, dst)
}
