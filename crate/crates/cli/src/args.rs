use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "usvdetect", version, about = "Detect ultrasonic vocalizations in WAV recordings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect calls in every WAV under a path and write annotation CSVs.
    Detect(DetectArgs),
    /// Score predicted annotations against gold tables.
    Eval(EvalArgs),
    /// Paired t-tests between two evaluation CSVs.
    Compare(CompareArgs),
    /// Time the pipeline single-threaded.
    Bench(BenchArgs),
    /// Render a spectrogram stage with annotation boxes to PNG.
    Render(RenderArgs),
    /// Write a synthetic recording and its ground truth.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// WAV file or directory searched recursively.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Output directory.
    #[arg(long, short)]
    pub output: PathBuf,
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    /// Worker threads; defaults to the available cores.
    #[arg(long, short)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Directory of predicted `.annotations.csv` files.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Directory of gold tables.
    #[arg(long, short)]
    pub gold: PathBuf,
    /// Per-recording metrics CSV; the summary goes next to it.
    #[arg(long, short)]
    pub output: PathBuf,
    /// Gold adapter name from the config (`canonical` is built in).
    #[arg(long, short, default_value = "canonical")]
    pub adapter: String,
    /// Directory of the recordings, for their durations.
    #[arg(long)]
    pub audio: Option<PathBuf>,
    #[arg(long, short)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Metrics CSV of detector A.
    pub a: PathBuf,
    /// Metrics CSV of detector B.
    pub b: PathBuf,
    #[arg(long, short)]
    pub output: PathBuf,
    /// Name used for the comparison column; defaults to `<a> vs <b>` stems.
    #[arg(long)]
    pub label: Option<String>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// WAV file or directory. Without it, synthetic audio is generated.
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    /// Seconds of synthetic audio when no input is given.
    #[arg(long, default_value_t = 60.0)]
    pub seconds: f64,
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    /// Also write the report here as JSON.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RenderStage {
    /// Spectrogram magnitudes in dB.
    Raw,
    /// Contrast-equalized image before the second threshold.
    Cleaned,
    /// Final binary mask.
    Mask,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    /// Annotation CSV to draw; detections are drawn when omitted.
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    #[arg(long, short)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "raw")]
    pub stage: RenderStage,
    #[arg(long, short)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WavFormat {
    Pcm16,
    Float32,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Output WAV; the truth CSV is written beside it as `<stem>.truth.csv`.
    #[arg(long, short)]
    pub output: PathBuf,
    /// JSON document with `duration_s`, `noise_amplitude`, `seed`, `chirps`.
    #[arg(long, conflicts_with_all = ["chirp", "duration", "noise", "seed"])]
    pub spec: Option<PathBuf>,
    /// `start,duration,f0,f1,amplitude`; repeatable.
    #[arg(long, value_parser = parse_chirp, allow_hyphen_values = true)]
    pub chirp: Vec<usv_core::synth::Chirp>,
    #[arg(long)]
    pub duration: Option<f64>,
    /// Standard deviation of the white noise.
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "pcm16")]
    pub format: WavFormat,
}

fn parse_chirp(s: &str) -> Result<usv_core::synth::Chirp, String> {
    usv_core::synth::Chirp::parse(s)
}
