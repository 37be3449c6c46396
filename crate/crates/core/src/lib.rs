//! Ultrasonic vocalization detection from spectrogram contours.
//!
//! A recording is resampled to a canonical rate, transformed into a cropped
//! dB spectrogram, cleaned by a median / Otsu / CLAHE / Otsu / closing chain,
//! and split into 8-connected regions whose bounding boxes become timed,
//! band-limited annotations. The [`evaluation`] module scores annotation sets
//! sample by sample against a reference.

pub mod annotations;
pub mod audio;
pub mod config;
pub mod detection;
pub mod enhance;
pub mod evaluation;
pub mod grid;
pub mod pipeline;
pub mod render;
pub mod spectrogram;
pub mod synth;

pub use annotations::{AnnotationError, AnnotationSet, GoldAdapter, UsvAnnotation};
pub use audio::{AudioError, AudioRecording};
pub use config::PipelineConfig;
pub use enhance::{BinaryMask, EnhanceError, GrayImage};
pub use evaluation::EvalError;
pub use grid::Grid;
pub use spectrogram::{Spectrogram, SpectrogramAxes, SpectrogramError, SpectrogramParams};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Audio(#[from] AudioError),
    #[error(transparent)]
    Spectrogram(#[from] SpectrogramError),
    #[error(transparent)]
    Enhance(#[from] EnhanceError),
    #[error(transparent)]
    Annotation(#[from] AnnotationError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Image(#[from] image::ImageError),
    #[error("configuration: {0}")]
    Config(String),
}
