use serde::Serialize;

use super::{EvalError, LabelVector};

/// Per-sample 2x2 tally of predicted against actual labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

pub fn confusion(pred: &LabelVector, actual: &LabelVector) -> Result<ConfusionCounts, EvalError> {
    if pred.len() != actual.len() || pred.rate() != actual.rate() {
        return Err(EvalError::LengthMismatch {
            pred: pred.len(),
            actual: actual.len(),
        });
    }
    let tp = pred.overlap(actual);
    let fp = pred.count_true() - tp;
    let fn_ = actual.count_true() - tp;
    Ok(ConfusionCounts {
        tp,
        fp,
        fn_,
        tn: pred.len() - tp - fp - fn_,
    })
}

/// Which metrics had a zero denominator and were reported as 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Degenerate {
    pub precision: bool,
    pub recall: bool,
    pub f1: bool,
    pub specificity: bool,
}

impl Degenerate {
    pub fn any(&self) -> bool {
        self.precision || self.recall || self.f1 || self.specificity
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub specificity: f64,
    pub counts: ConfusionCounts,
    pub degenerate: Degenerate,
}

fn ratio(num: u64, den: u64) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

pub fn metrics(counts: ConfusionCounts) -> MetricsReport {
    let ConfusionCounts { tp, fp, fn_, tn } = counts;
    let (precision, dp) = ratio(tp, tp + fp);
    let (recall, dr) = ratio(tp, tp + fn_);
    let (specificity, ds) = ratio(tn, tn + fp);
    let sum = precision + recall;
    let (f1, df) = if sum > 0.0 {
        (2.0 * precision * recall / sum, false)
    } else {
        (0.0, true)
    };
    MetricsReport {
        precision,
        recall,
        f1,
        specificity,
        counts,
        degenerate: Degenerate {
            precision: dp,
            recall: dr,
            f1: df,
            specificity: ds,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

impl MeanSd {
    /// Mean and sample standard deviation; `sd == 0` for a single value.
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        // shifted by the first value so identical inputs give exact results
        let pivot = values[0];
        let mean = pivot + values.iter().map(|v| v - pivot).sum::<f64>() / n;
        let sd = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Self { mean, sd }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AggregateReport {
    pub n: usize,
    pub precision: MeanSd,
    pub recall: MeanSd,
    pub f1: MeanSd,
    pub specificity: MeanSd,
}

pub fn aggregate(reports: &[MetricsReport]) -> Result<AggregateReport, EvalError> {
    if reports.is_empty() {
        return Err(EvalError::EmptyAggregate);
    }
    let col = |f: fn(&MetricsReport) -> f64| MeanSd::of(&reports.iter().map(f).collect::<Vec<_>>());
    Ok(AggregateReport {
        n: reports.len(),
        precision: col(|r| r.precision),
        recall: col(|r| r.recall),
        f1: col(|r| r.f1),
        specificity: col(|r| r.specificity),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(v: &[u8]) -> LabelVector {
        LabelVector::from_bits(&v.iter().map(|&b| b == 1).collect::<Vec<_>>(), 10)
    }

    fn counts(tp: u64, fp: u64, fn_: u64, tn: u64) -> ConfusionCounts {
        ConfusionCounts { tp, fp, fn_, tn }
    }

    #[test]
    fn identical_vectors() {
        let v = bits(&[1, 1, 0, 1, 0, 0, 0]);
        assert_eq!(confusion(&v, &v).unwrap(), counts(3, 0, 0, 4));
    }

    #[test]
    fn one_of_each() {
        assert_eq!(confusion(&bits(&[1, 1, 0, 0]), &bits(&[1, 0, 1, 0])).unwrap(), counts(1, 1, 1, 1));
    }

    #[test]
    fn all_false_positives() {
        assert_eq!(confusion(&bits(&[1; 8]), &bits(&[0; 8])).unwrap(), counts(0, 8, 0, 0));
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(confusion(&bits(&[1, 0]), &bits(&[1])), Err(EvalError::LengthMismatch { .. })));
    }

    #[test]
    fn balanced_metrics() {
        let m = metrics(counts(1, 1, 1, 1));
        assert_eq!((m.precision, m.recall, m.f1, m.specificity), (0.5, 0.5, 0.5, 0.5));
        assert!(!m.degenerate.any());
    }

    #[test]
    fn perfect_match() {
        let m = metrics(counts(40, 0, 0, 60));
        assert_eq!((m.precision, m.recall, m.f1, m.specificity), (1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn zero_denominators_are_flagged() {
        let m = metrics(counts(0, 0, 5, 5));
        assert_eq!((m.precision, m.recall, m.f1, m.specificity), (0.0, 0.0, 0.0, 1.0));
        assert!(m.degenerate.precision && m.degenerate.f1);
        assert!(!m.degenerate.recall && !m.degenerate.specificity);
    }

    #[test]
    fn aggregate_cases() {
        let one = metrics(counts(3, 1, 2, 10));
        let a = aggregate(&[one]).unwrap();
        assert_eq!(a.f1.mean, one.f1);
        assert_eq!(a.f1.sd, 0.0);

        let mut r1 = one;
        r1.f1 = 0.8;
        let mut r2 = one;
        r2.f1 = 1.0;
        let a = aggregate(&[r1, r2]).unwrap();
        assert!((a.f1.mean - 0.9).abs() < 1e-15);
        assert!((a.f1.sd - 0.2 / 2f64.sqrt()).abs() < 1e-12);
        assert!((a.f1.sd - 0.141421).abs() < 1e-6);

        let a = aggregate(&vec![one; 27]).unwrap();
        assert_eq!(a.n, 27);
        assert_eq!(a.precision.sd, 0.0);
        assert_eq!(a.specificity.sd, 0.0);

        assert!(matches!(aggregate(&[]), Err(EvalError::EmptyAggregate)));
    }
}
