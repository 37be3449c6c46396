//! Sample-level evaluation: annotations are rasterized onto the audio sample
//! grid, compared sample by sample, summarized per recording and across
//! recordings, and compared between detectors with paired t-tests.

mod labels;
mod metrics;
mod stats;

use thiserror::Error;

pub use labels::{rasterize, LabelVector};
pub use metrics::{aggregate, confusion, metrics, AggregateReport, ConfusionCounts, Degenerate, MeanSd, MetricsReport};
pub use stats::{ln_beta, ln_gamma, paired_t_test, regularized_incomplete_beta, student_t_two_tailed, TTest};

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("label vectors differ: predicted {pred} samples, actual {actual}")]
    LengthMismatch { pred: u64, actual: u64 },
    #[error("sample rate must be positive")]
    ZeroRate,
    #[error("cannot aggregate zero reports")]
    EmptyAggregate,
    #[error("paired samples differ in length: {a} vs {b}")]
    PairedLength { a: usize, b: usize },
    #[error("paired t-test needs at least 2 pairs, got {0}")]
    TooFewPairs(usize),
}

/// Rasterizes both sets at `rate` over `n_samples` and scores them.
pub fn evaluate_sets(
    pred: &crate::annotations::AnnotationSet,
    gold: &crate::annotations::AnnotationSet,
    n_samples: u64,
    rate: u32,
) -> Result<MetricsReport, EvalError> {
    let p = rasterize(pred, n_samples, rate)?;
    let g = rasterize(gold, n_samples, rate)?;
    Ok(metrics(confusion(&p, &g)?))
}
