use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::AudioRecording;

/// Fourier-domain resampling: the spectrum is truncated or zero-padded to
/// the output length and inverted.
///
/// For an even shared length the Nyquist bin is split across both halves
/// when upsampling and folded when downsampling, so real input stays real.
/// Output length is `round(len * target / source)`.
pub fn resample(rec: &AudioRecording, target_rate: u32) -> AudioRecording {
    assert!(target_rate > 0, "target rate must be positive");
    let source_rate = rec.sample_rate();
    if source_rate == target_rate {
        return rec.clone();
    }

    let n = rec.len();
    let m = ((n as f64) * f64::from(target_rate) / f64::from(source_rate)).round() as usize;
    let m = m.max(1);

    let mut planner = FftPlanner::<f64>::new();
    let mut spectrum: Vec<Complex<f64>> = rec
        .samples()
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .collect();
    planner.plan_fft_forward(n).process(&mut spectrum);

    let k = n.min(m);
    let mut out = vec![Complex::new(0.0, 0.0); m];
    let half = (k + 1) / 2;
    out[..half].copy_from_slice(&spectrum[..half]);
    for i in 1..half {
        out[m - i] = spectrum[n - i];
    }
    if k % 2 == 0 {
        let nyq = k / 2;
        if m > n {
            let v = spectrum[nyq] * 0.5;
            out[nyq] = v;
            out[m - nyq] = v;
        } else {
            out[nyq] = spectrum[nyq] + spectrum[n - nyq];
        }
    }

    planner.plan_fft_inverse(m).process(&mut out);
    let scale = 1.0 / n as f64;
    let samples = out.iter().map(|c| c.re * scale).collect();
    AudioRecording::new(samples, target_rate, rec.source()).expect("output is non-empty")
}
