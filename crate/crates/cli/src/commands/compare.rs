//! `compare`: paired t-tests between two detectors' per-recording metrics.

use std::collections::BTreeMap;

use serde::Serialize;
use usv_core::evaluation::{paired_t_test, MeanSd};

use super::eval::{read_metrics_csv, MetricsRow, METRICS};
use crate::args::CompareArgs;
use crate::error::{CliError, Outcome};
use crate::files::write_file;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub metric: String,
    pub comparison: String,
    pub t: f64,
    pub p: f64,
    pub dof: usize,
    pub mean_a: f64,
    pub mean_b: f64,
}

/// Pairs rows by recording id; both sides must cover the same recordings.
pub fn compare(a: &[MetricsRow], b: &[MetricsRow], comparison: &str) -> Result<Vec<ComparisonRow>, CliError> {
    let index = |rows: &[MetricsRow]| -> Result<BTreeMap<String, MetricsRow>, CliError> {
        let mut m = BTreeMap::new();
        for r in rows {
            if m.insert(r.recording_id.clone(), r.clone()).is_some() {
                return Err(CliError::Failed(format!("recording {} listed twice", r.recording_id)));
            }
        }
        Ok(m)
    };
    let (a, b) = (index(a)?, index(b)?);
    if !a.keys().eq(b.keys()) {
        let only_a: Vec<_> = a.keys().filter(|k| !b.contains_key(*k)).cloned().collect();
        let only_b: Vec<_> = b.keys().filter(|k| !a.contains_key(*k)).cloned().collect();
        return Err(CliError::Failed(format!(
            "recording sets differ: only in A {only_a:?}, only in B {only_b:?}"
        )));
    }
    METRICS
        .iter()
        .map(|&name| {
            let xa: Vec<f64> = a.values().map(|r| r.metric(name).expect("known metric")).collect();
            let xb: Vec<f64> = b.values().map(|r| r.metric(name).expect("known metric")).collect();
            let t = paired_t_test(&xa, &xb).map_err(usv_core::Error::from)?;
            Ok(ComparisonRow {
                metric: name.to_string(),
                comparison: comparison.to_string(),
                t: t.t,
                p: t.p,
                dof: t.dof,
                mean_a: MeanSd::of(&xa).mean,
                mean_b: MeanSd::of(&xb).mean,
            })
        })
        .collect()
}

pub fn run(args: &CompareArgs) -> Result<Outcome, CliError> {
    let a = read_metrics_csv(&args.a)?;
    let b = read_metrics_csv(&args.b)?;
    let stem = |p: &std::path::Path| p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let label = args.label.clone().unwrap_or_else(|| format!("{} vs {}", stem(&args.a), stem(&args.b)));
    let rows = compare(&a, &b, &label)?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for r in &rows {
        w.serialize(r).map_err(|e| CliError::Failed(e.to_string()))?;
        println!("{:<12} t = {:>9.4}  p = {:.4}  (dof {})", r.metric, r.t, r.p, r.dof);
    }
    write_file(&args.output, w.into_inner().map_err(|e| CliError::Failed(e.to_string()))?)?;
    Ok(Outcome::Success)
}
