//! Minimal RIFF/WAVE reader and writer.
//!
//! Supports PCM 16-bit, PCM 32-bit and IEEE float 32-bit, including the
//! `WAVE_FORMAT_EXTENSIBLE` wrapper around those. Chunks are located by ID
//! scan, so headers with `LIST`/`fact`/`JUNK` chunks before `data` are fine.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::Path;

use super::{AudioError, AudioRecording};

const FORMAT_PCM: u16 = 0x0001;
const FORMAT_IEEE_FLOAT: u16 = 0x0003;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

/// Sample encodings the reader accepts and the writer can produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleFormat {
    Pcm16,
    Pcm32,
    Float32,
}

impl SampleFormat {
    fn bytes_per_sample(self) -> usize {
        match self {
            SampleFormat::Pcm16 => 2,
            SampleFormat::Pcm32 | SampleFormat::Float32 => 4,
        }
    }

    fn format_tag(self) -> u16 {
        match self {
            SampleFormat::Pcm16 | SampleFormat::Pcm32 => FORMAT_PCM,
            SampleFormat::Float32 => FORMAT_IEEE_FLOAT,
        }
    }

    fn bits(self) -> u16 {
        (self.bytes_per_sample() * 8) as u16
    }
}

/// Header-level facts about a WAV file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WavInfo {
    pub format: SampleFormat,
    pub channels: u16,
    pub sample_rate: u32,
    pub frames: u64,
}

impl WavInfo {
    pub fn duration_seconds(&self) -> f64 {
        self.frames as f64 / f64::from(self.sample_rate)
    }
}

struct Located {
    info: WavInfo,
    data_offset: u64,
}

fn read_u16(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn read_u32(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

fn parse_fmt(body: &[u8]) -> Result<(SampleFormat, u16, u32), AudioError> {
    if body.len() < 16 {
        return Err(AudioError::Malformed("fmt chunk shorter than 16 bytes".into()));
    }
    let mut tag = read_u16(body, 0);
    let channels = read_u16(body, 2);
    let sample_rate = read_u32(body, 4);
    let bits = read_u16(body, 14);
    if tag == FORMAT_EXTENSIBLE {
        // cbSize(2) validBits(2) channelMask(4) then the sub-format GUID,
        // whose first two bytes carry the effective format code.
        if body.len() < 26 {
            return Err(AudioError::Malformed("extensible fmt chunk too short".into()));
        }
        tag = read_u16(body, 24);
    }
    let format = match (tag, bits) {
        (FORMAT_PCM, 16) => SampleFormat::Pcm16,
        (FORMAT_PCM, 32) => SampleFormat::Pcm32,
        (FORMAT_IEEE_FLOAT, 32) => SampleFormat::Float32,
        _ => return Err(AudioError::UnsupportedEncoding { format_tag: tag, bits }),
    };
    if channels == 0 {
        return Err(AudioError::Malformed("zero channels".into()));
    }
    if sample_rate == 0 {
        return Err(AudioError::Malformed("zero sample rate".into()));
    }
    Ok((format, channels, sample_rate))
}

fn locate<R: Read + Seek>(src: &mut R) -> Result<Located, AudioError> {
    let file_len = src.seek(SeekFrom::End(0))?;
    src.seek(SeekFrom::Start(0))?;

    let mut riff = [0u8; 12];
    src.read_exact(&mut riff)
        .map_err(|_| AudioError::Malformed("file shorter than a RIFF header".into()))?;
    if &riff[0..4] != b"RIFF" || &riff[8..12] != b"WAVE" {
        return Err(AudioError::Malformed("missing RIFF/WAVE signature".into()));
    }

    let mut fmt: Option<(SampleFormat, u16, u32)> = None;
    let mut pos = 12u64;
    loop {
        let mut header = [0u8; 8];
        if pos + 8 > file_len {
            return Err(AudioError::Malformed("no data chunk found".into()));
        }
        src.seek(SeekFrom::Start(pos))?;
        src.read_exact(&mut header)?;
        let id = [header[0], header[1], header[2], header[3]];
        let size = u64::from(read_u32(&header, 4));
        let body_start = pos + 8;

        match &id {
            b"fmt " => {
                let mut body = vec![0u8; size as usize];
                src.read_exact(&mut body)
                    .map_err(|_| AudioError::Malformed("truncated fmt chunk".into()))?;
                fmt = Some(parse_fmt(&body)?);
            }
            b"data" => {
                let (format, channels, sample_rate) = fmt
                    .ok_or_else(|| AudioError::Malformed("data chunk precedes fmt chunk".into()))?;
                let available = file_len - body_start;
                if size > available {
                    return Err(AudioError::TruncatedData {
                        declared: size,
                        available,
                    });
                }
                let block = format.bytes_per_sample() as u64 * u64::from(channels);
                if size % block != 0 {
                    return Err(AudioError::TruncatedData {
                        declared: size,
                        available: size - size % block,
                    });
                }
                return Ok(Located {
                    info: WavInfo {
                        format,
                        channels,
                        sample_rate,
                        frames: size / block,
                    },
                    data_offset: body_start,
                });
            }
            _ => {}
        }
        // Chunks are word aligned.
        pos = body_start + size + (size & 1);
    }
}

fn open(path: &Path) -> Result<BufReader<File>, AudioError> {
    File::open(path).map(BufReader::new).map_err(|source| AudioError::Open {
        path: path.display().to_string(),
        source,
    })
}

/// Reads only the header chunks of `path`.
pub fn read_wav_info(path: impl AsRef<Path>) -> Result<WavInfo, AudioError> {
    let mut src = open(path.as_ref())?;
    Ok(locate(&mut src)?.info)
}

/// Loads one channel of a WAV file as normalized samples.
///
/// Integer samples are scaled by `1 / 2^(bits - 1)`; float samples pass
/// through unchanged.
pub fn load_wav(path: impl AsRef<Path>, channel: usize) -> Result<AudioRecording, AudioError> {
    let path = path.as_ref();
    let mut src = open(path)?;
    let Located { info, data_offset } = locate(&mut src)?;
    if channel >= usize::from(info.channels) {
        return Err(AudioError::ChannelOutOfRange {
            channel,
            channels: info.channels,
        });
    }
    if info.frames == 0 {
        return Err(AudioError::Empty);
    }

    let width = info.format.bytes_per_sample();
    let stride = width * usize::from(info.channels);
    let mut bytes = vec![0u8; info.frames as usize * stride];
    src.seek(SeekFrom::Start(data_offset))?;
    src.read_exact(&mut bytes)?;

    let offset = channel * width;
    let samples: Vec<f64> = bytes
        .chunks_exact(stride)
        .map(|frame| {
            let s = &frame[offset..offset + width];
            match info.format {
                SampleFormat::Pcm16 => f64::from(i16::from_le_bytes([s[0], s[1]])) / 32768.0,
                SampleFormat::Pcm32 => {
                    f64::from(i32::from_le_bytes([s[0], s[1], s[2], s[3]])) / 2_147_483_648.0
                }
                SampleFormat::Float32 => f64::from(f32::from_le_bytes([s[0], s[1], s[2], s[3]])),
            }
        })
        .collect();

    AudioRecording::new(samples, info.sample_rate, path.display().to_string())
}

/// Writes a mono WAV file. Integer encodings round and saturate.
pub fn write_wav(
    path: impl AsRef<Path>,
    rec: &AudioRecording,
    format: SampleFormat,
) -> Result<(), AudioError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| AudioError::Open {
        path: path.display().to_string(),
        source,
    })?;
    let mut out = BufWriter::new(file);

    let width = format.bytes_per_sample();
    let data_len = (rec.samples().len() * width) as u32;
    out.write_all(b"RIFF")?;
    out.write_all(&(36 + data_len).to_le_bytes())?;
    out.write_all(b"WAVE")?;
    out.write_all(b"fmt ")?;
    out.write_all(&16u32.to_le_bytes())?;
    out.write_all(&format.format_tag().to_le_bytes())?;
    out.write_all(&1u16.to_le_bytes())?;
    out.write_all(&rec.sample_rate().to_le_bytes())?;
    out.write_all(&(rec.sample_rate() * width as u32).to_le_bytes())?;
    out.write_all(&(width as u16).to_le_bytes())?;
    out.write_all(&format.bits().to_le_bytes())?;
    out.write_all(b"data")?;
    out.write_all(&data_len.to_le_bytes())?;

    for &v in rec.samples() {
        match format {
            SampleFormat::Pcm16 => {
                let q = (v * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
                out.write_all(&q.to_le_bytes())?;
            }
            SampleFormat::Pcm32 => {
                let q = (v * 2_147_483_648.0)
                    .round()
                    .clamp(-2_147_483_648.0, 2_147_483_647.0) as i32;
                out.write_all(&q.to_le_bytes())?;
            }
            SampleFormat::Float32 => out.write_all(&(v as f32).to_le_bytes())?,
        }
    }
    out.flush()?;
    Ok(())
}
