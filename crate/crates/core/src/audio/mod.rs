//! Audio input: WAV decoding, channel selection and FFT resampling.

mod resample;
mod wav;

pub use resample::resample;
pub use wav::{load_wav, read_wav_info, write_wav, SampleFormat, WavInfo};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AudioError {
    #[error("cannot open {path}: {source}")]
    Open {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed WAV: {0}")]
    Malformed(String),
    #[error("unsupported WAV encoding: format code 0x{format_tag:04X} with {bits} bits per sample")]
    UnsupportedEncoding { format_tag: u16, bits: u16 },
    #[error("channel {channel} out of range for a {channels}-channel file")]
    ChannelOutOfRange { channel: usize, channels: u16 },
    #[error("truncated data chunk: header declares {declared} bytes, {available} usable")]
    TruncatedData { declared: u64, available: u64 },
    #[error("recording contains no samples")]
    Empty,
    #[error("sample rate must be positive")]
    ZeroRate,
}

/// A mono recording with samples normalized to `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioRecording {
    samples: Vec<f64>,
    sample_rate: u32,
    source: String,
}

impl AudioRecording {
    pub fn new(
        samples: Vec<f64>,
        sample_rate: u32,
        source: impl Into<String>,
    ) -> Result<Self, AudioError> {
        if samples.is_empty() {
            return Err(AudioError::Empty);
        }
        if sample_rate == 0 {
            return Err(AudioError::ZeroRate);
        }
        Ok(Self {
            samples,
            sample_rate,
            source: source.into(),
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_seconds(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }
}
