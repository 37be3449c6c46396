//! End-to-end detection for one recording.

use std::time::{Duration, Instant};

use crate::annotations::AnnotationSet;
use crate::audio::{resample, AudioRecording};
use crate::config::PipelineConfig;
use crate::detection::{extract_regions, filter_and_merge, regions_to_annotations};
use crate::enhance::{enhance_detailed, EnhanceOutput, EnhanceStage};
use crate::spectrogram::{compute_spectrogram, Spectrogram};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Resample,
    Spectrogram,
    Enhance(EnhanceStage),
    Regions,
    Annotate,
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Resample => "resample",
            Stage::Spectrogram => "spectrogram",
            Stage::Enhance(EnhanceStage::Median) => "median",
            Stage::Enhance(EnhanceStage::Normalize) => "normalize",
            Stage::Enhance(EnhanceStage::FirstOtsu) => "otsu_1",
            Stage::Enhance(EnhanceStage::Clahe) => "clahe",
            Stage::Enhance(EnhanceStage::SecondOtsu) => "otsu_2",
            Stage::Enhance(EnhanceStage::Close) => "close",
            Stage::Regions => "regions",
            Stage::Annotate => "annotate",
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub annotations: AnnotationSet,
    pub spectrogram: Spectrogram,
    pub enhanced: EnhanceOutput,
    pub n_regions: usize,
    pub timings: Vec<(Stage, Duration)>,
}

/// Resample, transform, clean, extract and post-process one recording.
pub fn run(rec: &AudioRecording, recording_id: &str, cfg: &PipelineConfig) -> Result<PipelineOutput, Error> {
    let mut timings = Vec::with_capacity(10);

    let t = Instant::now();
    let resampled;
    let rec = if rec.sample_rate() == cfg.spectrogram.canonical_rate {
        rec
    } else {
        resampled = resample(rec, cfg.spectrogram.canonical_rate);
        &resampled
    };
    timings.push((Stage::Resample, t.elapsed()));

    let t = Instant::now();
    let spectrogram = compute_spectrogram(rec, &cfg.spectrogram)?;
    timings.push((Stage::Spectrogram, t.elapsed()));

    let enhanced = enhance_detailed(&spectrogram, &cfg.enhance)?;
    timings.extend(enhanced.timings.iter().map(|&(s, d)| (Stage::Enhance(s), d)));

    let t = Instant::now();
    let regions = extract_regions(&enhanced.mask);
    timings.push((Stage::Regions, t.elapsed()));

    let t = Instant::now();
    let raw = regions_to_annotations(&regions, &spectrogram.axes, recording_id, cfg.detection.time_convention);
    let kept = filter_and_merge(&raw, &cfg.detection);
    let annotations = AnnotationSet::new(recording_id, Some(spectrogram.axes.duration), kept)?;
    timings.push((Stage::Annotate, t.elapsed()));

    Ok(PipelineOutput {
        annotations,
        spectrogram,
        enhanced,
        n_regions: regions.len(),
        timings,
    })
}
