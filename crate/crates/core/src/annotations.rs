//! Call annotations: the canonical CSV format written by the detector and
//! column-mapped ingestion of manually annotated gold standards.
//!
//! Canonical files look like
//!
//! ```text
//! recording_id,start_s,end_s,low_hz,high_hz,label
//! rec1,0.500000,1.005000,15000.0,15050.0,
//! ```
//!
//! with LF line endings and empty cells for absent values.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CANONICAL_HEADER: [&str; 6] = ["recording_id", "start_s", "end_s", "low_hz", "high_hz", "label"];

#[derive(Debug, Error)]
pub enum AnnotationError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("line {line}: unparsable number {value:?} in column {column}")]
    BadNumber { line: u64, column: String, value: String },
    #[error("line {line}: start {start} must be non-negative and before end {end}")]
    InvalidInterval { line: u64, start: f64, end: f64 },
    #[error("line {line}: low {low} Hz must be below high {high} Hz")]
    InvalidBand { line: u64, low: f64, high: f64 },
    #[error("mapped column {0:?} not found")]
    MissingColumn(String),
    #[error("annotation ending at {end} s exceeds recording duration {duration} s")]
    BeyondDuration { end: f64, duration: f64 },
    #[error("recording duration unknown: no audio and no adapter duration")]
    UnknownDuration,
}

/// One call: a time interval with an optional frequency band.
#[derive(Debug, Clone, PartialEq)]
pub struct UsvAnnotation {
    pub recording_id: String,
    pub start: f64,
    pub end: f64,
    pub low: Option<f64>,
    pub high: Option<f64>,
    pub label: Option<String>,
}

impl UsvAnnotation {
    pub fn new(recording_id: impl Into<String>, start: f64, end: f64, low: f64, high: f64) -> Self {
        Self {
            recording_id: recording_id.into(),
            start,
            end,
            low: Some(low),
            high: Some(high),
            label: None,
        }
    }

    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    pub fn bandwidth(&self) -> Option<f64> {
        Some(self.high? - self.low?)
    }

    fn check(&self, line: u64) -> Result<(), AnnotationError> {
        if !(self.start >= 0.0 && self.start < self.end) {
            return Err(AnnotationError::InvalidInterval {
                line,
                start: self.start,
                end: self.end,
            });
        }
        if let (Some(low), Some(high)) = (self.low, self.high) {
            if !(low < high) {
                return Err(AnnotationError::InvalidBand { line, low, high });
            }
        }
        Ok(())
    }
}

/// Annotations of one recording, sorted by start then end.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationSet {
    pub recording_id: String,
    /// `None` when read from a canonical CSV without paired audio.
    pub duration: Option<f64>,
    pub annotations: Vec<UsvAnnotation>,
}

fn sort_annotations(annotations: &mut [UsvAnnotation]) {
    annotations.sort_by(|a, b| a.start.total_cmp(&b.start).then(a.end.total_cmp(&b.end)));
}

impl AnnotationSet {
    pub fn new(
        recording_id: impl Into<String>,
        duration: Option<f64>,
        mut annotations: Vec<UsvAnnotation>,
    ) -> Result<Self, AnnotationError> {
        for a in &annotations {
            a.check(0)?;
        }
        sort_annotations(&mut annotations);
        let set = Self {
            recording_id: recording_id.into(),
            duration: None,
            annotations,
        };
        match duration {
            Some(d) => set.with_duration(d),
            None => Ok(set),
        }
    }

    /// Attaches a duration, checking that every annotation fits inside it.
    pub fn with_duration(mut self, duration: f64) -> Result<Self, AnnotationError> {
        if let Some(a) = self.annotations.iter().find(|a| a.end > duration) {
            return Err(AnnotationError::BeyondDuration { end: a.end, duration });
        }
        self.duration = Some(duration);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.annotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.annotations.is_empty()
    }
}

fn fmt_opt(v: Option<f64>, decimals: usize) -> String {
    v.map(|x| format!("{x:.decimals$}")).unwrap_or_default()
}

/// Serializes `set` in the canonical CSV layout.
pub fn write_annotations_to<W: Write>(set: &AnnotationSet, out: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CANONICAL_HEADER)?;
    for a in &set.annotations {
        w.write_record([
            a.recording_id.as_str(),
            &format!("{:.6}", a.start),
            &format!("{:.6}", a.end),
            &fmt_opt(a.low, 1),
            &fmt_opt(a.high, 1),
            a.label.as_deref().unwrap_or(""),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_annotations(set: &AnnotationSet, path: impl AsRef<Path>) -> Result<(), AnnotationError> {
    let path = path.as_ref();
    let io_err = |source| AnnotationError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    write_annotations_to(set, BufWriter::new(file)).map_err(|source| AnnotationError::Csv {
        path: path.display().to_string(),
        source,
    })
}

/// Strips the suffixes this tool writes (`.annotations.csv`, `.truth.csv`)
/// or a plain extension from a file name.
pub fn recording_stem(path: &Path) -> String {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    for suffix in [".annotations.csv", ".truth.csv"] {
        if let Some(stem) = name.strip_suffix(suffix) {
            return stem.to_string();
        }
    }
    match name.rsplit_once('.') {
        Some((stem, _)) if !stem.is_empty() => stem.to_string(),
        _ => name,
    }
}

fn parse_num(line: u64, column: &str, cell: &str) -> Result<f64, AnnotationError> {
    let trimmed = cell.trim();
    trimmed
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| AnnotationError::BadNumber {
            line,
            column: column.to_string(),
            value: cell.to_string(),
        })
}

fn parse_opt(line: u64, column: &str, cell: Option<&str>) -> Result<Option<f64>, AnnotationError> {
    match cell.map(str::trim) {
        None | Some("") => Ok(None),
        Some(c) => parse_num(line, column, c).map(Some),
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> AnnotationError + '_ {
    move |source| AnnotationError::Csv {
        path: path.display().to_string(),
        source,
    }
}

/// Parses a canonical annotation CSV.
pub fn read_annotations(path: impl AsRef<Path>) -> Result<AnnotationSet, AnnotationError> {
    let path = path.as_ref();
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(csv_err(path))?;
    let header = rdr.headers().map_err(csv_err(path))?.clone();
    if header.iter().map(str::trim).ne(CANONICAL_HEADER) {
        return Err(AnnotationError::Malformed {
            line: 1,
            message: format!("expected header {:?}", CANONICAL_HEADER.join(",")),
        });
    }

    let mut annotations = Vec::new();
    let mut recording_id: Option<String> = None;
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err(path))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != CANONICAL_HEADER.len() {
            return Err(AnnotationError::Malformed {
                line,
                message: format!("expected 6 fields, found {}", rec.len()),
            });
        }
        let label = rec[5].to_string();
        let a = UsvAnnotation {
            recording_id: rec[0].to_string(),
            start: parse_num(line, "start_s", &rec[1])?,
            end: parse_num(line, "end_s", &rec[2])?,
            low: parse_opt(line, "low_hz", Some(&rec[3]))?,
            high: parse_opt(line, "high_hz", Some(&rec[4]))?,
            label: (!label.is_empty()).then_some(label),
        };
        a.check(line)?;
        recording_id.get_or_insert_with(|| a.recording_id.clone());
        annotations.push(a);
    }
    sort_annotations(&mut annotations);
    Ok(AnnotationSet {
        recording_id: recording_id.unwrap_or_else(|| recording_stem(path)),
        duration: None,
        annotations,
    })
}

/// A source column, by header name or zero-based position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColumnRef {
    Index(usize),
    Name(String),
}

impl std::fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ColumnRef::Index(i) => write!(f, "#{i}"),
            ColumnRef::Name(n) => f.write_str(n),
        }
    }
}

/// Declarative mapping from a gold-standard table onto [`UsvAnnotation`]s.
///
/// Unmapped columns are kept in the label as `key=value` pairs joined by `;`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoldAdapter {
    pub start: ColumnRef,
    pub end: ColumnRef,
    #[serde(default)]
    pub low: Option<ColumnRef>,
    #[serde(default)]
    pub high: Option<ColumnRef>,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    #[serde(default = "default_true")]
    pub has_header: bool,
    /// Multiplier taking the file's time unit to seconds.
    #[serde(default = "default_scale")]
    pub time_scale: f64,
    /// Used when no paired audio gives the recording length.
    #[serde(default)]
    pub duration_s: Option<f64>,
}

fn default_delimiter() -> char {
    ','
}

fn default_true() -> bool {
    true
}

fn default_scale() -> f64 {
    1.0
}

impl GoldAdapter {
    /// Adapter for files already in the canonical layout.
    pub fn canonical() -> Self {
        Self {
            start: ColumnRef::Name("start_s".into()),
            end: ColumnRef::Name("end_s".into()),
            low: Some(ColumnRef::Name("low_hz".into())),
            high: Some(ColumnRef::Name("high_hz".into())),
            delimiter: ',',
            has_header: true,
            time_scale: 1.0,
            duration_s: None,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !self.delimiter.is_ascii() {
            return Err(format!("delimiter {:?} must be ASCII", self.delimiter));
        }
        if !(self.time_scale > 0.0 && self.time_scale.is_finite()) {
            return Err("time_scale must be positive".into());
        }
        if let Some(d) = self.duration_s {
            if !(d > 0.0) {
                return Err("duration_s must be positive".into());
            }
        }
        if !self.has_header {
            for c in [Some(&self.start), Some(&self.end), self.low.as_ref(), self.high.as_ref()].into_iter().flatten() {
                if matches!(c, ColumnRef::Name(_)) {
                    return Err(format!("column {c} referenced by name but the file has no header"));
                }
            }
        }
        Ok(())
    }
}

fn resolve(col: &ColumnRef, header: Option<&csv::StringRecord>) -> Result<usize, AnnotationError> {
    match col {
        ColumnRef::Index(i) => Ok(*i),
        ColumnRef::Name(n) => header
            .and_then(|h| h.iter().position(|c| c.trim() == n))
            .ok_or_else(|| AnnotationError::MissingColumn(n.clone())),
    }
}

/// Reads a gold-standard table through `adapter`.
///
/// `duration` comes from the paired audio when known; otherwise the
/// adapter's `duration_s` is required.
pub fn read_gold(
    path: impl AsRef<Path>,
    adapter: &GoldAdapter,
    duration: Option<f64>,
) -> Result<AnnotationSet, AnnotationError> {
    let path = path.as_ref();
    adapter.validate().map_err(|message| AnnotationError::Malformed { line: 0, message })?;
    let duration = duration.or(adapter.duration_s).ok_or(AnnotationError::UnknownDuration)?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(adapter.has_header)
        .delimiter(adapter.delimiter as u8)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err(path))?;
    let header = if adapter.has_header {
        Some(rdr.headers().map_err(csv_err(path))?.clone())
    } else {
        None
    };

    let start_i = resolve(&adapter.start, header.as_ref())?;
    let end_i = resolve(&adapter.end, header.as_ref())?;
    let low_i = adapter.low.as_ref().map(|c| resolve(c, header.as_ref())).transpose()?;
    let high_i = adapter.high.as_ref().map(|c| resolve(c, header.as_ref())).transpose()?;
    let mapped = [Some(start_i), Some(end_i), low_i, high_i];
    let col_name = |i: usize| -> String {
        header
            .as_ref()
            .and_then(|h| h.get(i))
            .map_or_else(|| format!("col{i}"), str::to_string)
    };

    let recording_id = recording_stem(path);
    let mut annotations = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err(path))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let cell = |i: usize| -> Result<&str, AnnotationError> {
            rec.get(i).ok_or_else(|| AnnotationError::Malformed {
                line,
                message: format!("row has no column {i}"),
            })
        };
        let start = parse_num(line, &col_name(start_i), cell(start_i)?)? * adapter.time_scale;
        let end = parse_num(line, &col_name(end_i), cell(end_i)?)? * adapter.time_scale;
        let low = match low_i {
            Some(i) => parse_opt(line, &col_name(i), rec.get(i))?,
            None => None,
        };
        let high = match high_i {
            Some(i) => parse_opt(line, &col_name(i), rec.get(i))?,
            None => None,
        };
        let extras: Vec<String> = rec
            .iter()
            .enumerate()
            .filter(|(i, v)| !mapped.contains(&Some(*i)) && !v.is_empty())
            .map(|(i, v)| format!("{}={v}", col_name(i)))
            .collect();
        if start >= duration {
            return Err(AnnotationError::BeyondDuration { end, duration });
        }
        let end = if end > duration {
            log::warn!("{}:{line}: end {end} s clamped to recording duration {duration} s", path.display());
            duration
        } else {
            end
        };
        let a = UsvAnnotation {
            recording_id: recording_id.clone(),
            start,
            end,
            low,
            high,
            label: (!extras.is_empty()).then(|| extras.join(";")),
        };
        a.check(line)?;
        annotations.push(a);
    }
    sort_annotations(&mut annotations);
    Ok(AnnotationSet {
        recording_id,
        duration: Some(duration),
        annotations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp_file(name: &str, body: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        (dir, p)
    }

    #[test]
    fn empty_set_writes_header_only() {
        let set = AnnotationSet::new("r", Some(1.0), vec![]).unwrap();
        let mut buf = Vec::new();
        write_annotations_to(&set, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "recording_id,start_s,end_s,low_hz,high_hz,label\n");
    }

    #[test]
    fn exact_row_format() {
        let set = AnnotationSet::new("rec1", Some(2.0), vec![UsvAnnotation::new("rec1", 0.5, 1.005, 15000.0, 15050.0)]).unwrap();
        let mut buf = Vec::new();
        write_annotations_to(&set, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(1), Some("rec1,0.500000,1.005000,15000.0,15050.0,"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.annotations.csv");
        let mut b = UsvAnnotation::new("x", 0.25, 0.3, 40000.0, 52000.5);
        b.label = Some("kind=50k, flat".into());
        let set = AnnotationSet::new(
            "x",
            None,
            vec![UsvAnnotation::new("x", 1.125, 1.25, 20000.0, 30000.0), b],
        )
        .unwrap();
        write_annotations(&set, &p).unwrap();
        let back = read_annotations(&p).unwrap();
        assert_eq!(back, set);
    }

    #[test]
    fn read_rejects_bad_rows() {
        let (_d, p) = tmp_file("a.csv", "recording_id,start_s,end_s,low_hz,high_hz,label\nr,0.5,0.5,,,\n");
        assert!(matches!(read_annotations(&p), Err(AnnotationError::InvalidInterval { line: 2, .. })));
        let (_d, p) = tmp_file("a.csv", "recording_id,start_s,end_s,low_hz,high_hz,label\nr,0.1,0.2,,,\nr,-0.1,0.2,,,\n");
        assert!(matches!(read_annotations(&p), Err(AnnotationError::InvalidInterval { line: 3, .. })));
        let (_d, p) = tmp_file("a.csv", "recording_id,start_s,end_s,low_hz,high_hz,label\nr,abc,0.2,,,\n");
        assert!(matches!(read_annotations(&p), Err(AnnotationError::BadNumber { line: 2, .. })));
        let (_d, p) = tmp_file("a.csv", "start,end\n0.1,0.2\n");
        assert!(matches!(read_annotations(&p), Err(AnnotationError::Malformed { line: 1, .. })));
    }

    #[test]
    fn empty_canonical_file_takes_stem() {
        let (_d, p) = tmp_file("rat07.annotations.csv", "recording_id,start_s,end_s,low_hz,high_hz,label\n");
        let set = read_annotations(&p).unwrap();
        assert_eq!(set.recording_id, "rat07");
        assert!(set.is_empty());
    }

    fn start_stop() -> GoldAdapter {
        GoldAdapter {
            start: ColumnRef::Name("Start".into()),
            end: ColumnRef::Name("Stop".into()),
            low: None,
            high: None,
            delimiter: ',',
            has_header: true,
            time_scale: 1.0,
            duration_s: None,
        }
    }

    #[test]
    fn gold_direct_mapping() {
        let (_d, p) = tmp_file("ctx01.csv", "Start,Stop,Peak Freq\n1.5,1.7,55000\n0.2,0.35,\n");
        let set = read_gold(&p, &start_stop(), Some(10.0)).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.recording_id, "ctx01");
        assert_eq!((set.annotations[0].start, set.annotations[0].end), (0.2, 0.35));
        assert_eq!(set.annotations[0].label, None);
        assert_eq!((set.annotations[1].start, set.annotations[1].end), (1.5, 1.7));
        assert_eq!(set.annotations[1].label.as_deref(), Some("Peak Freq=55000"));
        assert!(set.annotations[1].low.is_none());
    }

    #[test]
    fn gold_rejects_zero_length_with_line() {
        let (_d, p) = tmp_file("g.csv", "Start,Stop\n0.1,0.2\n0.4,0.4\n");
        let err = read_gold(&p, &start_stop(), Some(10.0)).unwrap_err();
        assert!(matches!(err, AnnotationError::InvalidInterval { line: 3, .. }), "{err}");
    }

    #[test]
    fn gold_errors() {
        let (_d, p) = tmp_file("g.csv", "Begin,Stop\n0.1,0.2\n");
        assert!(matches!(read_gold(&p, &start_stop(), Some(1.0)), Err(AnnotationError::MissingColumn(c)) if c == "Start"));
        let (_d, p) = tmp_file("g.csv", "Start,Stop\n0.1,x\n");
        assert!(matches!(read_gold(&p, &start_stop(), Some(1.0)), Err(AnnotationError::BadNumber { line: 2, .. })));
        let (_d, p) = tmp_file("g.csv", "Start,Stop\n0.1,0.2\n");
        assert!(matches!(read_gold(&p, &start_stop(), None), Err(AnnotationError::UnknownDuration)));
    }

    #[test]
    fn gold_positional_tab_separated_milliseconds() {
        let adapter = GoldAdapter {
            start: ColumnRef::Index(1),
            end: ColumnRef::Index(2),
            low: None,
            high: None,
            delimiter: '\t',
            has_header: false,
            time_scale: 1e-3,
            duration_s: Some(5.0),
        };
        let (_d, p) = tmp_file("m.txt", "call\t100\t150\nflat\t2000\t2100\n");
        let set = read_gold(&p, &adapter, None).unwrap();
        assert_eq!(set.duration, Some(5.0));
        assert_eq!(set.len(), 2);
        assert!((set.annotations[1].end - 2.1).abs() < 1e-12);
        assert_eq!(set.annotations[0].label.as_deref(), Some("col0=call"));
    }

    #[test]
    fn adapter_json_forms() {
        let a: GoldAdapter = serde_json::from_str(r#"{"start":"Begin Time (s)","end":3,"delimiter":"\t"}"#).unwrap();
        assert_eq!(a.start, ColumnRef::Name("Begin Time (s)".into()));
        assert_eq!(a.end, ColumnRef::Index(3));
        assert!(a.has_header);
        assert!(serde_json::from_str::<GoldAdapter>(r#"{"start":0,"end":1,"typo":1}"#).is_err());
    }

    #[test]
    fn gold_end_clamped_to_duration() {
        let (_d, p) = tmp_file("g.csv", "Start,Stop\n0.5,1.2\n");
        let set = read_gold(&p, &start_stop(), Some(1.0)).unwrap();
        assert_eq!(set.annotations[0].end, 1.0);
        let (_d, p) = tmp_file("g.csv", "Start,Stop\n1.5,1.7\n");
        assert!(read_gold(&p, &start_stop(), Some(1.0)).is_err());
    }

    #[test]
    fn duration_enforced() {
        let set = AnnotationSet::new("r", None, vec![UsvAnnotation::new("r", 0.1, 2.0, 1.0, 2.0)]).unwrap();
        assert!(matches!(set.with_duration(1.5), Err(AnnotationError::BeyondDuration { .. })));
    }

    #[test]
    fn stems() {
        assert_eq!(recording_stem(Path::new("/a/b/rat1.annotations.csv")), "rat1");
        assert_eq!(recording_stem(Path::new("rat1.truth.csv")), "rat1");
        assert_eq!(recording_stem(Path::new("rat1.wav")), "rat1");
        assert_eq!(recording_stem(Path::new("rat1")), "rat1");
    }
}
