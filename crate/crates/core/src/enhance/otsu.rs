use super::{BinaryMask, GrayImage};

pub fn histogram(img: &GrayImage) -> [u64; 256] {
    let mut h = [0u64; 256];
    for &p in img.as_slice() {
        h[usize::from(p)] += 1;
    }
    h
}

/// Between-class variance (unnormalized by N^2) for a split into a class of
/// `w0` pixels summing to `s0` and a class of `w1` pixels summing to `s1`.
/// An empty class gives zero.
pub fn between_class_variance(w0: u64, s0: u64, w1: u64, s1: u64) -> f64 {
    if w0 == 0 || w1 == 0 {
        return 0.0;
    }
    let m0 = s0 as f64 / w0 as f64;
    let m1 = s1 as f64 / w1 as f64;
    w0 as f64 * w1 as f64 * (m0 - m1) * (m0 - m1)
}

/// Full 256-bit product of two `u128`s as `(high, low)`.
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a1, a0) = (a >> 64, a & MASK);
    let (b1, b0) = (b >> 64, b & MASK);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & MASK) + (p10 & MASK);
    let lo = (p00 & MASK) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

/// Between-class variance scaled by N^2, kept as the exact fraction
/// `(N*s0 - w0*S)^2 / (w0*w1)`.
#[derive(Clone, Copy)]
struct Variance {
    num: u128,
    den: u128,
}

impl Variance {
    fn new(total: u64, total_sum: u64, w0: u64, s0: u64) -> Self {
        let w1 = total - w0;
        if w0 == 0 || w1 == 0 {
            return Self { num: 0, den: 1 };
        }
        let diff = (u128::from(total) * u128::from(s0)).abs_diff(u128::from(w0) * u128::from(total_sum));
        Self {
            num: diff * diff,
            den: u128::from(w0) * u128::from(w1),
        }
    }

    fn greater_than(self, other: Self) -> bool {
        mul_wide(self.num, other.den) > mul_wide(other.num, self.den)
    }
}

/// Threshold maximizing between-class variance for a split `<= t` / `> t`;
/// ties resolve to the smallest `t`. Comparisons are exact.
/// Above 2^28 pixels the squared numerator no longer fits a `u128` and the
/// search falls back to `f64` variances.
pub fn otsu_level(hist: &[u64; 256]) -> u8 {
    let total: u64 = hist.iter().sum();
    if total >= 1 << 28 {
        return otsu_level_f64(hist);
    }
    let total_sum: u64 = hist.iter().enumerate().map(|(v, &c)| v as u64 * c).sum();
    let (mut w0, mut s0) = (0u64, 0u64);
    let mut best_t = 0u8;
    let mut best = Variance { num: 0, den: 1 };
    for (t, &count) in hist.iter().enumerate() {
        w0 += count;
        s0 += t as u64 * count;
        let var = Variance::new(total, total_sum, w0, s0);
        if var.greater_than(best) {
            best = var;
            best_t = t as u8;
        }
    }
    best_t
}

fn otsu_level_f64(hist: &[u64; 256]) -> u8 {
    let total: u64 = hist.iter().sum();
    let total_sum: u64 = hist.iter().enumerate().map(|(v, &c)| v as u64 * c).sum();
    let (mut w0, mut s0) = (0u64, 0u64);
    let (mut best_t, mut best) = (0u8, 0.0);
    for (t, &count) in hist.iter().enumerate() {
        w0 += count;
        s0 += t as u64 * count;
        let var = between_class_variance(w0, s0, total - w0, total_sum - s0);
        if var > best {
            best = var;
            best_t = t as u8;
        }
    }
    best_t
}

/// Otsu threshold and the mask of pixels strictly above it.
pub fn otsu_threshold(img: &GrayImage) -> (u8, BinaryMask) {
    let t = otsu_level(&histogram(img));
    (t, img.map(|&p| p > t))
}
