//! WAV decoding, validation and framing.
//!
//! Samples are stored as `f64` in `[-1, 1)`. 16-bit integers are divided by
//! 32768 so that `-32768` maps to exactly `-1.0` and `16384` to `0.5`.

use std::f64::consts::PI;
use std::path::Path;

use thiserror::Error;

const PCM16_SCALE: f64 = 32768.0;

#[derive(Debug, Error)]
pub enum AudioError {
    #[error("malformed RIFF/WAVE container: {0}")]
    MalformedContainer(String),
    #[error("unsupported WAV format: {0}")]
    UnsupportedFormat(String),
    #[error("audio contains no samples")]
    EmptyAudio,
    #[error("invalid audio: {0}")]
    InvalidSamples(String),
    #[error("signal has {n_samples} samples, shorter than one frame of {frame_len}")]
    SignalTooShort { n_samples: usize, frame_len: usize },
    #[error("invalid framing: {0}")]
    InvalidFraming(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Decoded mono audio.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    samples: Vec<f64>,
    sample_rate_hz: u32,
    source_id: String,
}

impl AudioBuffer {
    pub fn new(
        samples: Vec<f64>,
        sample_rate_hz: u32,
        source_id: impl Into<String>,
    ) -> Result<Self, AudioError> {
        if samples.is_empty() {
            return Err(AudioError::EmptyAudio);
        }
        if sample_rate_hz == 0 {
            return Err(AudioError::InvalidSamples("sample rate must be positive".into()));
        }
        if let Some(pos) = samples
            .iter()
            .position(|s| !s.is_finite() || *s < -1.0 || *s > 1.0)
        {
            return Err(AudioError::InvalidSamples(format!(
                "sample {pos} = {} outside [-1, 1]",
                samples[pos]
            )));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
            source_id: source_id.into(),
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_seconds(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }

    /// Returns a copy with every sample multiplied by `gain`, clamped to `[-1, 1]`.
    pub fn scaled(&self, gain: f64) -> Self {
        Self {
            samples: self
                .samples
                .iter()
                .map(|s| (s * gain).clamp(-1.0, 1.0))
                .collect(),
            sample_rate_hz: self.sample_rate_hz,
            source_id: self.source_id.clone(),
        }
    }
}

/// Reads a 16-bit PCM WAV file (mono or stereo). Stereo is averaged to mono.
///
/// The source id is the file stem.
pub fn load_wav(path: impl AsRef<Path>) -> Result<AudioBuffer, AudioError> {
    let path = path.as_ref();
    let reader = hound::WavReader::open(path).map_err(map_hound_error)?;
    let spec = reader.spec();
    if spec.sample_format != hound::SampleFormat::Int {
        return Err(AudioError::UnsupportedFormat(
            "floating-point samples (expected PCM)".into(),
        ));
    }
    if spec.bits_per_sample != 16 {
        return Err(AudioError::UnsupportedFormat(format!(
            "{}-bit samples (expected 16)",
            spec.bits_per_sample
        )));
    }
    let channels = spec.channels as usize;
    if channels != 1 && channels != 2 {
        return Err(AudioError::UnsupportedFormat(format!(
            "{channels} channels (expected 1 or 2)"
        )));
    }
    let raw = reader
        .into_samples::<i16>()
        .collect::<Result<Vec<i16>, _>>()
        .map_err(map_hound_error)?;
    let samples: Vec<f64> = if channels == 1 {
        raw.iter().map(|&s| s as f64 / PCM16_SCALE).collect()
    } else {
        raw.chunks_exact(2)
            .map(|lr| (lr[0] as f64 + lr[1] as f64) / 2.0 / PCM16_SCALE)
            .collect()
    };
    if samples.is_empty() {
        return Err(AudioError::EmptyAudio);
    }
    let source_id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    AudioBuffer::new(samples, spec.sample_rate, source_id)
}

fn map_hound_error(err: hound::Error) -> AudioError {
    match err {
        hound::Error::IoError(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => {
            AudioError::MalformedContainer(format!("truncated file: {e}"))
        }
        hound::Error::IoError(e) => AudioError::Io(e),
        hound::Error::FormatError(msg) => AudioError::MalformedContainer(msg.to_string()),
        hound::Error::Unsupported => {
            AudioError::UnsupportedFormat("unsupported WAV encoding".into())
        }
        hound::Error::TooWide => AudioError::UnsupportedFormat("sample too wide".into()),
        hound::Error::InvalidSampleFormat => {
            AudioError::UnsupportedFormat("sample format does not match PCM16".into())
        }
        other => AudioError::MalformedContainer(other.to_string()),
    }
}

/// Writes a mono 16-bit PCM WAV file.
pub fn write_wav(buf: &AudioBuffer, path: impl AsRef<Path>) -> Result<(), AudioError> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: buf.sample_rate_hz,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(map_hound_error)?;
    for &s in &buf.samples {
        let q = (s * PCM16_SCALE).round().clamp(i16::MIN as f64, i16::MAX as f64) as i16;
        writer.write_sample(q).map_err(map_hound_error)?;
    }
    writer.finalize().map_err(map_hound_error)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum WindowKind {
    Rectangular,
    #[default]
    Hann,
    Hamming,
    Gaussian,
}

impl WindowKind {
    /// Periodic (DFT-even) window coefficients of length `len`.
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        let n = len as f64;
        (0..len)
            .map(|i| {
                let i = i as f64;
                match self {
                    WindowKind::Rectangular => 1.0,
                    WindowKind::Hann => 0.5 - 0.5 * (2.0 * PI * i / n).cos(),
                    WindowKind::Hamming => 0.54 - 0.46 * (2.0 * PI * i / n).cos(),
                    WindowKind::Gaussian => {
                        // sigma = 0.4 of the half-width
                        let half = (n - 1.0) / 2.0;
                        let x = (i - half) / (0.4 * half.max(f64::EPSILON));
                        (-0.5 * x * x).exp()
                    }
                }
            })
            .collect()
    }
}

impl std::str::FromStr for WindowKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rectangular" | "rect" | "boxcar" => Ok(WindowKind::Rectangular),
            "hann" | "hanning" => Ok(WindowKind::Hann),
            "hamming" => Ok(WindowKind::Hamming),
            "gaussian" | "gauss" => Ok(WindowKind::Gaussian),
            other => Err(format!("unknown window kind '{other}'")),
        }
    }
}

/// Frame/hop/window settings expressed in time units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameConfig {
    pub frame_ms: f64,
    pub hop_ms: f64,
    pub window: WindowKind,
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self {
            frame_ms: 25.0,
            hop_ms: 10.0,
            window: WindowKind::Hann,
        }
    }
}

impl FrameConfig {
    /// Frame length and hop in samples at `sample_rate_hz`.
    pub fn to_samples(&self, sample_rate_hz: u32) -> (usize, usize) {
        let sr = sample_rate_hz as f64;
        let frame_len = ((self.frame_ms / 1000.0 * sr).round() as usize).max(2);
        let hop = ((self.hop_ms / 1000.0 * sr).round() as usize).clamp(1, frame_len);
        (frame_len, hop)
    }
}

/// Windowed analysis frames, stored row-major.
///
/// The unwindowed samples are retained so that time-domain descriptors such as
/// the zero-crossing rate can see the raw signal.
#[derive(Debug, Clone)]
pub struct FrameMatrix {
    frames: Vec<f64>,
    source: Vec<f64>,
    n_frames: usize,
    frame_len: usize,
    hop: usize,
    sample_rate_hz: u32,
    window_kind: WindowKind,
}

impl FrameMatrix {
    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    pub fn frame_len(&self) -> usize {
        self.frame_len
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn window_kind(&self) -> WindowKind {
        self.window_kind
    }

    pub fn hop_seconds(&self) -> f64 {
        self.hop as f64 / self.sample_rate_hz as f64
    }

    /// Windowed samples of frame `i`.
    pub fn frame(&self, i: usize) -> &[f64] {
        &self.frames[i * self.frame_len..(i + 1) * self.frame_len]
    }

    /// Samples of frame `i` before windowing.
    pub fn raw_frame(&self, i: usize) -> &[f64] {
        let start = i * self.hop;
        &self.source[start..start + self.frame_len]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.frames.chunks_exact(self.frame_len)
    }
}

/// Number of full frames that fit in `n_samples`.
pub fn frame_count(n_samples: usize, frame_len: usize, hop: usize) -> usize {
    if n_samples < frame_len {
        0
    } else {
        1 + (n_samples - frame_len) / hop
    }
}

/// Splits the signal into overlapping windowed frames. A trailing partial
/// frame is discarded.
pub fn frame_signal(
    buf: &AudioBuffer,
    frame_len: usize,
    hop: usize,
    window_kind: WindowKind,
) -> Result<FrameMatrix, AudioError> {
    if frame_len < 2 {
        return Err(AudioError::InvalidFraming(format!(
            "frame_len {frame_len} < 2"
        )));
    }
    if hop == 0 || hop > frame_len {
        return Err(AudioError::InvalidFraming(format!(
            "hop {hop} outside [1, {frame_len}]"
        )));
    }
    let n = buf.len();
    if n < frame_len {
        return Err(AudioError::SignalTooShort {
            n_samples: n,
            frame_len,
        });
    }
    let window = window_kind.coefficients(frame_len);
    let n_frames = frame_count(n, frame_len, hop);
    let mut frames = Vec::with_capacity(n_frames * frame_len);
    for i in 0..n_frames {
        let start = i * hop;
        frames.extend(
            buf.samples[start..start + frame_len]
                .iter()
                .zip(&window)
                .map(|(s, w)| s * w),
        );
    }
    Ok(FrameMatrix {
        frames,
        source: buf.samples.clone(),
        n_frames,
        frame_len,
        hop,
        sample_rate_hz: buf.sample_rate_hz,
        window_kind,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn write_raw_wav(path: &Path, channels: u16, samples: &[i16], rate: u32) {
        let spec = hound::WavSpec {
            channels,
            sample_rate: rate,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(path, spec).unwrap();
        for &s in samples {
            w.write_sample(s).unwrap();
        }
        w.finalize().unwrap();
    }

    #[test]
    fn zero_samples_decode_to_zero() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("z.wav");
        write_raw_wav(&p, 1, &[0, 0, 0], 16000);
        let buf = load_wav(&p).unwrap();
        assert_eq!(buf.samples(), &[0.0, 0.0, 0.0]);
        assert_eq!(buf.source_id(), "z");
    }

    #[test]
    fn half_scale_sample_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("h.wav");
        write_raw_wav(&p, 1, &[16384], 16000);
        let buf = load_wav(&p).unwrap();
        assert_eq!(buf.samples(), &[0.5]);
        assert_eq!(buf.sample_rate_hz(), 16000);
    }

    #[test]
    fn stereo_is_averaged() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.wav");
        // interleaved L,R
        write_raw_wav(&p, 2, &[32767, -32768, 0, 0], 8000);
        let buf = load_wav(&p).unwrap();
        // (32767 - 32768) / 2 / 32768
        assert_eq!(buf.samples(), &[-1.52587890625e-05, 0.0]);
    }

    #[test]
    fn identical_channels_mix_to_either_channel() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("id.wav");
        let mono: Vec<i16> = vec![1, -7, 32767, -32768, 1234];
        let stereo: Vec<i16> = mono.iter().flat_map(|&s| [s, s]).collect();
        write_raw_wav(&p, 2, &stereo, 8000);
        let buf = load_wav(&p).unwrap();
        let expect: Vec<f64> = mono.iter().map(|&s| s as f64 / 32768.0).collect();
        assert_eq!(buf.samples(), expect.as_slice());
    }

    #[test]
    fn rejects_non_riff() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.wav");
        std::fs::write(&p, b"this is not a wav file at all").unwrap();
        assert!(matches!(
            load_wav(&p),
            Err(AudioError::MalformedContainer(_))
        ));
    }

    #[test]
    fn rejects_non_16_bit() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.wav");
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 8000,
            bits_per_sample: 32,
            sample_format: hound::SampleFormat::Float,
        };
        let mut w = hound::WavWriter::create(&p, spec).unwrap();
        w.write_sample(0.25f32).unwrap();
        w.finalize().unwrap();
        assert!(matches!(load_wav(&p), Err(AudioError::UnsupportedFormat(_))));

        let p8 = dir.path().join("b8.wav");
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 8000,
            bits_per_sample: 8,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(&p8, spec).unwrap();
        w.write_sample(3i8).unwrap();
        w.finalize().unwrap();
        assert!(matches!(load_wav(&p8), Err(AudioError::UnsupportedFormat(_))));
    }

    #[test]
    fn rejects_empty_data_chunk() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.wav");
        write_raw_wav(&p, 1, &[], 8000);
        assert!(matches!(load_wav(&p), Err(AudioError::EmptyAudio)));
    }

    #[test]
    fn skips_list_chunk_before_data() {
        // Hand-built RIFF with a LIST chunk between fmt and data.
        let mut bytes = Vec::new();
        let data: [i16; 2] = [16384, -16384];
        let list = b"INFOISFT\x04\x00\x00\x00abc\x00";
        let fmt_len = 16u32;
        let riff_len = 4 + (8 + fmt_len) + (8 + list.len() as u32) + (8 + 4);
        bytes.extend_from_slice(b"RIFF");
        bytes.extend_from_slice(&riff_len.to_le_bytes());
        bytes.extend_from_slice(b"WAVEfmt ");
        bytes.extend_from_slice(&fmt_len.to_le_bytes());
        bytes.extend_from_slice(&1u16.to_le_bytes()); // PCM
        bytes.extend_from_slice(&1u16.to_le_bytes()); // mono
        bytes.extend_from_slice(&8000u32.to_le_bytes());
        bytes.extend_from_slice(&16000u32.to_le_bytes());
        bytes.extend_from_slice(&2u16.to_le_bytes());
        bytes.extend_from_slice(&16u16.to_le_bytes());
        bytes.extend_from_slice(b"LIST");
        bytes.extend_from_slice(&(list.len() as u32).to_le_bytes());
        bytes.extend_from_slice(list);
        bytes.extend_from_slice(b"data");
        bytes.extend_from_slice(&4u32.to_le_bytes());
        for s in data {
            bytes.extend_from_slice(&s.to_le_bytes());
        }
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("list.wav");
        std::fs::write(&p, bytes).unwrap();
        let buf = load_wav(&p).unwrap();
        assert_eq!(buf.samples(), &[0.5, -0.5]);
    }

    #[test]
    fn framing_counts_and_starts() {
        let samples: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
        let buf = AudioBuffer::new(samples, 100, "t").unwrap();
        let fm = frame_signal(&buf, 4, 2, WindowKind::Rectangular).unwrap();
        assert_eq!(fm.n_frames(), 4);
        let starts: Vec<f64> = fm.iter().map(|f| f[0]).collect();
        assert_eq!(starts, vec![0.0, 0.2, 0.4, 0.6]);
    }

    #[test]
    fn constant_signal_frames_equal_window() {
        let buf = AudioBuffer::new(vec![1.0; 12], 100, "c").unwrap();
        let fm = frame_signal(&buf, 4, 4, WindowKind::Hann).unwrap();
        let w = WindowKind::Hann.coefficients(4);
        for f in fm.iter() {
            assert_eq!(f, w.as_slice());
        }
    }

    #[test]
    fn short_signal_is_an_error() {
        let buf = AudioBuffer::new(vec![0.1, 0.2, 0.3], 100, "s").unwrap();
        assert!(matches!(
            frame_signal(&buf, 4, 2, WindowKind::Hann),
            Err(AudioError::SignalTooShort { n_samples: 3, frame_len: 4 })
        ));
    }

    #[test]
    fn buffer_rejects_out_of_range() {
        assert!(AudioBuffer::new(vec![1.5], 10, "x").is_err());
        assert!(AudioBuffer::new(vec![f64::NAN], 10, "x").is_err());
        assert!(matches!(
            AudioBuffer::new(vec![], 10, "x"),
            Err(AudioError::EmptyAudio)
        ));
        assert!(AudioBuffer::new(vec![0.0], 0, "x").is_err());
    }

    proptest! {
        #[test]
        fn frame_count_formula(n in 2usize..600, frame_len in 2usize..64, hop_frac in 0.0f64..1.0) {
            prop_assume!(n >= frame_len);
            let hop = 1 + ((frame_len - 1) as f64 * hop_frac) as usize;
            let buf = AudioBuffer::new(vec![0.25; n], 1000, "p").unwrap();
            let fm = frame_signal(&buf, frame_len, hop, WindowKind::Hamming).unwrap();
            prop_assert_eq!(fm.n_frames(), 1 + (n - frame_len) / hop);
            // last frame lies fully inside the signal
            prop_assert!((fm.n_frames() - 1) * hop + frame_len <= n);
        }

        #[test]
        fn wav_round_trip_within_one_lsb(samples in proptest::collection::vec(-1.0f64..1.0, 1..200)) {
            let dir = tempfile::tempdir().unwrap();
            let p = dir.path().join("rt.wav");
            let buf = AudioBuffer::new(samples.clone(), 22050, "rt").unwrap();
            write_wav(&buf, &p).unwrap();
            let back = load_wav(&p).unwrap();
            prop_assert_eq!(back.len(), samples.len());
            for (a, b) in samples.iter().zip(back.samples()) {
                prop_assert!((a - b).abs() <= 1.0 / 32768.0);
            }
        }
    }
}
