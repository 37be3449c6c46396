//! Student-t machinery for paired comparisons between detectors.

use serde::Serialize;

use super::{EvalError, MeanSd};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const EPS: f64 = 1e-16;
    const TINY: f64 = 1e-300;
    const MAX_ITER: usize = 10_000;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)` for `a, b > 0`, `x` in `[0, 1]`.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0, "shape parameters must be positive");
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = a * x.ln() + b * (1.0 - x).ln() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - ln_front.exp() * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

/// Two-tailed tail probability `P(|T| >= |t|)` of Student's t with `dof`
/// degrees of freedom.
pub fn student_t_two_tailed(t: f64, dof: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    if t == 0.0 {
        return 1.0;
    }
    regularized_incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TTest {
    /// `±inf` when every difference is the same nonzero value.
    pub t: f64,
    pub p: f64,
    pub dof: usize,
}

/// Paired t-test on `a - b`, two-tailed.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTest, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::PairedLength { a: a.len(), b: b.len() });
    }
    if a.len() < 2 {
        return Err(EvalError::TooFewPairs(a.len()));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = d.len();
    let dof = n - 1;
    let MeanSd { mean, sd } = MeanSd::of(&d);
    if sd == 0.0 {
        return Ok(if mean == 0.0 {
            TTest { t: 0.0, p: 1.0, dof }
        } else {
            TTest {
                t: f64::INFINITY.copysign(mean),
                p: 0.0,
                dof,
            }
        });
    }
    let t = mean / (sd / (n as f64).sqrt());
    Ok(TTest {
        t,
        p: student_t_two_tailed(t, dof as f64),
        dof,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_known_values() {
        assert!((ln_gamma(1.0)).abs() < 1e-14);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
        // ln(10!) = ln Γ(11)
        assert!((ln_gamma(11.0) - 3_628_800f64.ln()).abs() < 1e-12);
        assert!((ln_gamma(0.1) - 2.252_712_651_734_206).abs() < 1e-12);
    }

    #[test]
    fn closed_forms() {
        for &x in &[0.01, 0.2, 0.5, 0.77, 0.999] {
            for &a in &[0.5, 1.0, 3.0, 12.5] {
                // I_x(a, 1) = x^a and I_x(1, b) = 1 - (1 - x)^b
                assert!((regularized_incomplete_beta(a, 1.0, x) - x.powf(a)).abs() < 1e-13);
                assert!((regularized_incomplete_beta(1.0, a, x) - (1.0 - (1.0 - x).powf(a))).abs() < 1e-13);
            }
        }
        // I_x(1/2, 1/2) = (2/π) asin(√x)
        let x: f64 = 0.3;
        let want = 2.0 / std::f64::consts::PI * x.sqrt().asin();
        assert!((regularized_incomplete_beta(0.5, 0.5, x) - want).abs() < 1e-13);
    }

    #[test]
    fn equal_samples() {
        let v = [0.3, 0.9, 0.5];
        assert_eq!(paired_t_test(&v, &v).unwrap(), TTest { t: 0.0, p: 1.0, dof: 2 });
    }

    #[test]
    fn constant_nonzero_difference() {
        let r = paired_t_test(&[1.0, 2.0, 3.0], &[0.5, 1.5, 2.5]).unwrap();
        assert_eq!(r.t, f64::INFINITY);
        assert_eq!(r.p, 0.0);
        let r = paired_t_test(&[0.5, 1.5, 2.5], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.t, f64::NEG_INFINITY);
    }

    #[test]
    fn dof_two_closed_form() {
        let r = paired_t_test(&[1.0, 2.0, 3.0], &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(r.dof, 2);
        assert!((r.t - 12f64.sqrt()).abs() < 1e-12);
        let closed = 1.0 - r.t / (r.t * r.t + 2.0).sqrt();
        assert!((r.p - closed).abs() < 1e-12);
        assert!((r.p - 0.0742).abs() < 1e-4);
    }

    #[test]
    fn cauchy_case() {
        assert!((student_t_two_tailed(1.0, 1.0) - 0.5).abs() < 1e-14);
        for &t in &[0.1, 2.0, 7.5, 40.0] {
            let closed = 1.0 - 2.0 / std::f64::consts::PI * f64::atan(t);
            assert!((student_t_two_tailed(t, 1.0) - closed).abs() < 1e-13);
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(paired_t_test(&[1.0], &[2.0]), Err(EvalError::TooFewPairs(1))));
        assert!(matches!(paired_t_test(&[1.0, 2.0], &[2.0]), Err(EvalError::PairedLength { .. })));
    }

    proptest::proptest! {
        #[test]
        fn antisymmetric(pairs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..30)) {
            let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let ab = paired_t_test(&a, &b).unwrap();
            let ba = paired_t_test(&b, &a).unwrap();
            proptest::prop_assert_eq!(ab.t, -ba.t);
            proptest::prop_assert_eq!(ab.p, ba.p);
        }

        #[test]
        fn p_decreases_with_abs_t(dof in 1usize..60, t in 0.0f64..20.0, dt in 0.01f64..5.0) {
            let p1 = student_t_two_tailed(t, dof as f64);
            let p2 = student_t_two_tailed(t + dt, dof as f64);
            proptest::prop_assert!(p2 <= p1);
            proptest::prop_assert_eq!(student_t_two_tailed(-t, dof as f64), p1);
        }
    }
}
