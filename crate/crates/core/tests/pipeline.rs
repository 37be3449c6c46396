//! Whole-pipeline behaviour on synthetic recordings.

use usv_core::audio::{load_wav, resample, write_wav, SampleFormat};
use usv_core::evaluation::evaluate_sets;
use usv_core::pipeline;
use usv_core::synth::{synthesize, Chirp, SynthSpec};
use usv_core::PipelineConfig;

fn chirps(n: usize, every: f64) -> Vec<Chirp> {
    (0..n)
        .map(|i| Chirp { start: 0.3 + every * i as f64, duration: 0.05, f0: 50_000.0, f1: 70_000.0, amplitude: 0.5 })
        .collect()
}

#[test]
fn recovers_synthetic_calls() {
    let spec = SynthSpec { duration_s: 5.0, noise_amplitude: 0.02, seed: 11, chirps: chirps(5, 0.9) };
    let (rec, truth) = synthesize(&spec, "syn").unwrap();
    let out = pipeline::run(&rec, "syn", &PipelineConfig::default()).unwrap();
    assert_eq!(out.annotations.len(), 5);
    for (d, t) in out.annotations.annotations.iter().zip(&truth.annotations) {
        assert!((d.start - t.start).abs() <= 0.015 && (d.end - t.end).abs() <= 0.015, "{d:?} vs {t:?}");
        assert!(d.low.unwrap() >= 45_000.0 && d.high.unwrap() <= 75_000.0);
    }
    let m = evaluate_sets(&out.annotations, &truth, rec.len() as u64, 250_000).unwrap();
    assert!(m.precision >= 0.95 && m.recall >= 0.95, "{m:?}");
}

#[test]
fn other_sample_rates_are_resampled() {
    let spec = SynthSpec { duration_s: 3.0, noise_amplitude: 0.02, seed: 2, chirps: chirps(3, 0.9) };
    let (rec, truth) = synthesize(&spec, "hi").unwrap();
    // 250 kHz -> 192 kHz keeps 50-70 kHz below the new Nyquist
    let low = resample(&rec, 192_000);
    let out = pipeline::run(&low, "hi", &PipelineConfig::default()).unwrap();
    assert_eq!(out.spectrogram.axes.rate, 250_000);
    assert_eq!(out.annotations.len(), 3);
    let m = evaluate_sets(&out.annotations, &truth, rec.len() as u64, 250_000).unwrap();
    assert!(m.precision >= 0.9 && m.recall >= 0.9, "{m:?}");
}

#[test]
fn float_wav_round_trip_gives_same_detections() {
    let spec = SynthSpec { duration_s: 2.0, noise_amplitude: 0.02, seed: 8, chirps: chirps(2, 0.8) };
    let (rec, _) = synthesize(&spec, "w").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("w.wav");
    write_wav(&p, &rec, SampleFormat::Float32).unwrap();
    let back = load_wav(&p, 0).unwrap();
    let cfg = PipelineConfig::default();
    let a = pipeline::run(&rec, "w", &cfg).unwrap();
    let b = pipeline::run(&back, "w", &cfg).unwrap();
    assert_eq!(a.annotations, b.annotations);
}

#[test]
fn stage_timings_cover_the_chain() {
    let spec = SynthSpec { duration_s: 1.0, ..Default::default() };
    let (rec, _) = synthesize(&spec, "t").unwrap();
    let out = pipeline::run(&rec, "t", &PipelineConfig::default()).unwrap();
    let names: Vec<_> = out.timings.iter().map(|(s, _)| s.name()).collect();
    assert_eq!(
        names,
        ["resample", "spectrogram", "median", "normalize", "otsu_1", "clahe", "otsu_2", "close", "regions", "annotate"]
    );
}
