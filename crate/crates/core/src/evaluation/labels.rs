use crate::annotations::AnnotationSet;

use super::EvalError;

/// Per-sample call presence, stored as sorted, disjoint, non-adjacent
/// half-open runs of sample indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    len: u64,
    rate: u32,
    runs: Vec<(u64, u64)>,
}

/// Smallest sample index `i` with `i / rate >= t`.
fn first_index_at_or_after(t: f64, rate: f64) -> u64 {
    if t <= 0.0 {
        return 0;
    }
    let mut i = (t * rate).ceil() as u64;
    while i > 0 && (i - 1) as f64 / rate >= t {
        i -= 1;
    }
    while (i as f64) / rate < t {
        i += 1;
    }
    i
}

impl LabelVector {
    /// Builds a vector from arbitrary half-open runs; overlapping or touching
    /// runs are united and empty ones dropped.
    pub fn from_runs(len: u64, rate: u32, mut runs: Vec<(u64, u64)>) -> Self {
        runs.retain(|&(a, b)| a < b);
        runs.sort_unstable();
        let mut merged: Vec<(u64, u64)> = Vec::with_capacity(runs.len());
        for (a, b) in runs {
            let (a, b) = (a.min(len), b.min(len));
            if a >= b {
                continue;
            }
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Self { len, rate, runs: merged }
    }

    pub fn from_bits(bits: &[bool], rate: u32) -> Self {
        let mut runs = Vec::new();
        let mut start = None;
        for (i, &b) in bits.iter().enumerate() {
            match (b, start) {
                (true, None) => start = Some(i as u64),
                (false, Some(s)) => {
                    runs.push((s, i as u64));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            runs.push((s, bits.len() as u64));
        }
        Self {
            len: bits.len() as u64,
            rate,
            runs,
        }
    }

    pub fn to_bits(&self) -> Vec<bool> {
        let mut bits = vec![false; self.len as usize];
        for &(a, b) in &self.runs {
            bits[a as usize..b as usize].fill(true);
        }
        bits
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn rate(&self) -> u32 {
        self.rate
    }

    pub fn runs(&self) -> &[(u64, u64)] {
        &self.runs
    }

    pub fn count_true(&self) -> u64 {
        self.runs.iter().map(|(a, b)| b - a).sum()
    }

    /// Number of samples true in both vectors.
    pub fn overlap(&self, other: &Self) -> u64 {
        let (mut i, mut j, mut total) = (0, 0, 0);
        while i < self.runs.len() && j < other.runs.len() {
            let (a0, a1) = self.runs[i];
            let (b0, b1) = other.runs[j];
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if lo < hi {
                total += hi - lo;
            }
            if a1 <= b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        total
    }
}

/// Marks sample `i` when some annotation has `start <= i / rate < end`.
///
/// Annotations reaching past `n_samples` are clamped with a warning.
pub fn rasterize(set: &AnnotationSet, n_samples: u64, rate: u32) -> Result<LabelVector, EvalError> {
    if rate == 0 {
        return Err(EvalError::ZeroRate);
    }
    let r = f64::from(rate);
    let runs = set
        .annotations
        .iter()
        .map(|a| {
            let lo = first_index_at_or_after(a.start, r);
            let hi = first_index_at_or_after(a.end, r);
            if hi > n_samples {
                log::warn!(
                    "{}: annotation [{}, {}) s extends past {} samples; clamped",
                    set.recording_id,
                    a.start,
                    a.end,
                    n_samples
                );
            }
            (lo, hi)
        })
        .collect();
    Ok(LabelVector::from_runs(n_samples, rate, runs))
}
