//! Spectrogram cleaning chain: median filter, 8-bit normalization, Otsu
//! binarization, CLAHE, a second Otsu pass and morphological closing.

mod clahe;
mod median;
mod morphology;
mod normalize;
mod otsu;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::Grid;
use crate::spectrogram::Spectrogram;

pub use clahe::clahe;
pub use median::median_filter;
pub use morphology::{dilate, erode, morph_close};
pub use normalize::normalize_to_u8;
pub use otsu::{between_class_variance, histogram, otsu_level, otsu_threshold};

/// 8-bit intensities laid out like the source spectrogram.
pub type GrayImage = Grid<u8>;
/// `true` marks candidate call energy.
pub type BinaryMask = Grid<bool>;

#[derive(Debug, Error, PartialEq)]
pub enum EnhanceError {
    #[error("median kernel must be odd and positive, got {0}")]
    MedianKernel(usize),
    #[error("CLAHE tile grid must be at least 1x1")]
    ZeroTiles,
    #[error("CLAHE clip limit must be positive, got {0}")]
    ClipLimit(f64),
    #[error("closing kernel must be at least 1x1, got {0}x{1}")]
    CloseKernel(usize, usize),
    #[error("image is empty")]
    EmptyImage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnhanceConfig {
    pub median_kernel: usize,
    pub clahe_clip_limit: f64,
    /// `(rows, cols)`
    pub clahe_tiles: (usize, usize),
    /// `(height, width)`
    pub close_kernel: (usize, usize),
}

impl Default for EnhanceConfig {
    fn default() -> Self {
        Self {
            median_kernel: 3,
            clahe_clip_limit: 2.0,
            clahe_tiles: (8, 8),
            close_kernel: (3, 3),
        }
    }
}

impl EnhanceConfig {
    pub fn validate(&self) -> Result<(), EnhanceError> {
        if self.median_kernel == 0 || self.median_kernel % 2 == 0 {
            return Err(EnhanceError::MedianKernel(self.median_kernel));
        }
        if !(self.clahe_clip_limit > 0.0) {
            return Err(EnhanceError::ClipLimit(self.clahe_clip_limit));
        }
        if self.clahe_tiles.0 == 0 || self.clahe_tiles.1 == 0 {
            return Err(EnhanceError::ZeroTiles);
        }
        if self.close_kernel.0 == 0 || self.close_kernel.1 == 0 {
            return Err(EnhanceError::CloseKernel(self.close_kernel.0, self.close_kernel.1));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnhanceStage {
    Median,
    Normalize,
    FirstOtsu,
    Clahe,
    SecondOtsu,
    Close,
}

/// Intermediate images of one run of the chain.
#[derive(Debug, Clone)]
pub struct EnhanceOutput {
    pub normalized: GrayImage,
    pub first_threshold: u8,
    pub equalized: GrayImage,
    pub second_threshold: u8,
    pub mask: BinaryMask,
    pub timings: Vec<(EnhanceStage, Duration)>,
}

fn timed<T>(timings: &mut Vec<(EnhanceStage, Duration)>, stage: EnhanceStage, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    timings.push((stage, start.elapsed()));
    out
}

/// Runs the full chain, keeping every intermediate.
pub fn enhance_detailed(spec: &Spectrogram, cfg: &EnhanceConfig) -> Result<EnhanceOutput, EnhanceError> {
    cfg.validate()?;
    if spec.values.is_empty() {
        return Err(EnhanceError::EmptyImage);
    }
    let mut timings = Vec::with_capacity(6);
    let filtered = timed(&mut timings, EnhanceStage::Median, || median_filter(&spec.values, cfg.median_kernel))?;
    let normalized = timed(&mut timings, EnhanceStage::Normalize, || normalize_to_u8(&filtered));
    drop(filtered);
    let (first_threshold, binary) = timed(&mut timings, EnhanceStage::FirstOtsu, || {
        let (t, m) = otsu_threshold(&normalized);
        (t, m.map(|&b| if b { 255u8 } else { 0 }))
    });
    let equalized = timed(&mut timings, EnhanceStage::Clahe, || {
        clahe(&binary, cfg.clahe_clip_limit, cfg.clahe_tiles)
    })?;
    let (second_threshold, mask) = timed(&mut timings, EnhanceStage::SecondOtsu, || otsu_threshold(&equalized));
    let mask = timed(&mut timings, EnhanceStage::Close, || morph_close(&mask, cfg.close_kernel));
    Ok(EnhanceOutput {
        normalized,
        first_threshold,
        equalized,
        second_threshold,
        mask,
        timings,
    })
}

pub fn enhance(spec: &Spectrogram, cfg: &EnhanceConfig) -> Result<BinaryMask, EnhanceError> {
    enhance_detailed(spec, cfg).map(|o| o.mask)
}
