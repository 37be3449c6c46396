//! `eval`: per-recording sample-level metrics against gold tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use usv_core::annotations::{read_annotations, read_gold, recording_stem};
use usv_core::audio::read_wav_info;
use usv_core::evaluation::{aggregate, evaluate_sets, AggregateReport, MeanSd, MetricsReport};

use super::detect::{RunManifest, MANIFEST_NAME};
use crate::args::EvalArgs;
use crate::error::{CliError, Outcome};
use crate::files::{find_files, find_wavs, has_extension, load_config, write_file};

/// One line of the metrics CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub recording_id: String,
    pub n_samples: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub specificity: f64,
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
    /// Metrics reported as 0 for lack of a denominator, `;`-separated.
    pub degenerate: String,
}

impl MetricsRow {
    pub fn new(recording_id: &str, n_samples: u64, r: &MetricsReport) -> Self {
        let d = r.degenerate;
        let flags: Vec<&str> = [
            (d.precision, "precision"),
            (d.recall, "recall"),
            (d.f1, "f1"),
            (d.specificity, "specificity"),
        ]
        .into_iter()
        .filter_map(|(b, n)| b.then_some(n))
        .collect();
        Self {
            recording_id: recording_id.to_string(),
            n_samples,
            precision: r.precision,
            recall: r.recall,
            f1: r.f1,
            specificity: r.specificity,
            tp: r.counts.tp,
            fp: r.counts.fp,
            fn_: r.counts.fn_,
            tn: r.counts.tn,
            degenerate: flags.join(";"),
        }
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        Some(match name {
            "precision" => self.precision,
            "recall" => self.recall,
            "f1" => self.f1,
            "specificity" => self.specificity,
            _ => return None,
        })
    }
}

pub const METRICS: [&str; 4] = ["precision", "recall", "f1", "specificity"];

pub fn write_metrics_csv(rows: &[MetricsRow], path: &Path) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Failed(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Failed(e.to_string()))?;
    write_file(path, bytes)
}

pub fn read_metrics_csv(path: &Path) -> Result<Vec<MetricsRow>, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))?;
    r.deserialize()
        .collect::<Result<Vec<MetricsRow>, _>>()
        .map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))
}

pub fn summary_text(agg: &AggregateReport) -> String {
    let mut s = format!("recordings: {}\n", agg.n);
    for (name, m) in [
        ("precision", agg.precision),
        ("recall", agg.recall),
        ("f1", agg.f1),
        ("specificity", agg.specificity),
    ] {
        let MeanSd { mean, sd } = m;
        let _ = writeln!(s, "{name:<12} {mean:.3} ± {sd:.3}");
    }
    s
}

pub fn summary_path(metrics_csv: &Path) -> PathBuf {
    metrics_csv.with_extension("summary.txt")
}

/// Recording lengths from the first available source: WAV headers under
/// `audio`, else the detection manifest beside the predictions.
fn durations(audio: Option<&Path>, pred_dir: &Path) -> Result<BTreeMap<String, f64>, CliError> {
    let mut out = BTreeMap::new();
    if let Some(dir) = audio {
        for wav in find_wavs(dir)? {
            let info = read_wav_info(&wav)?;
            out.insert(recording_stem(&wav), info.duration_seconds());
        }
        return Ok(out);
    }
    let manifest = pred_dir.join(MANIFEST_NAME);
    if manifest.is_file() {
        for f in RunManifest::load(&manifest)?.files {
            if let Some(d) = f.duration_s {
                out.insert(f.recording_id, d);
            }
        }
    }
    Ok(out)
}

/// Indexes files by recording id, reporting ids claimed by more than one file.
fn index(paths: Vec<PathBuf>, problems: &mut Vec<String>) -> BTreeMap<String, PathBuf> {
    let mut map = BTreeMap::new();
    for p in paths {
        let id = recording_stem(&p);
        if let Some(prev) = map.insert(id.clone(), p.clone()) {
            problems.push(format!("recording {id} appears twice: {} and {}", prev.display(), p.display()));
        }
    }
    map
}

fn evaluate_one(
    id: &str,
    pred: &Path,
    gold: &Path,
    duration: Option<f64>,
    adapter: &usv_core::GoldAdapter,
    rate: u32,
) -> Result<MetricsRow, CliError> {
    let gold = read_gold(gold, adapter, duration)?;
    let duration = gold.duration.expect("read_gold attaches a duration");
    let pred = read_annotations(pred)?;
    let n_samples = (duration * f64::from(rate)).round() as u64;
    let report = evaluate_sets(&pred, &gold, n_samples, rate).map_err(usv_core::Error::from)?;
    Ok(MetricsRow::new(id, n_samples, &report))
}

pub fn run(args: &EvalArgs) -> Result<Outcome, CliError> {
    let cfg = load_config(args.config.as_deref())?;
    let adapter = cfg
        .adapter(&args.adapter)
        .ok_or_else(|| CliError::Usage(format!("no adapter named {:?} in the config", args.adapter)))?;
    let rate = cfg.spectrogram.canonical_rate;

    let mut problems = Vec::new();
    let preds = index(find_files(&args.input, |p| p.to_string_lossy().ends_with(".annotations.csv"))?, &mut problems);
    let golds = index(
        find_files(&args.gold, |p| ["csv", "tsv", "txt"].iter().any(|e| has_extension(p, e)))?,
        &mut problems,
    );
    let durations = durations(args.audio.as_deref(), &args.input)?;

    let mut rows = Vec::new();
    for id in preds.keys().chain(golds.keys()).collect::<std::collections::BTreeSet<_>>() {
        let (Some(pred), Some(gold)) = (preds.get(id), golds.get(id)) else {
            let missing = if preds.contains_key(id) { "gold" } else { "prediction" };
            problems.push(format!("recording {id}: no {missing} file"));
            continue;
        };
        match evaluate_one(id, pred, gold, durations.get(id).copied(), &adapter, rate) {
            Ok(row) => rows.push(row),
            Err(e) => problems.push(format!("recording {id}: {e}")),
        }
    }
    for p in &problems {
        log::error!("{p}");
    }
    if rows.is_empty() {
        return Err(CliError::Failed(format!("no recording could be evaluated ({} problems)", problems.len())));
    }

    write_metrics_csv(&rows, &args.output)?;
    let reports: Vec<MetricsReport> = rows
        .iter()
        .map(|r| {
            usv_core::evaluation::metrics(usv_core::evaluation::ConfusionCounts {
                tp: r.tp,
                fp: r.fp,
                fn_: r.fn_,
                tn: r.tn,
            })
        })
        .collect();
    let agg = aggregate(&reports).map_err(usv_core::Error::from)?;
    let text = summary_text(&agg);
    print!("{text}");
    write_file(&summary_path(&args.output), text)?;
    Ok(Outcome::from_failures(problems.len()))
}
