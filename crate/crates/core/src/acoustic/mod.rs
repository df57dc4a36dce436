//! Frame-level low-level descriptors (LLDs).
//!
//! Every descriptor is a pure function of its input. Logs are taken of values
//! floored at [`SPECTRAL_FLOOR`] so silence produces finite numbers.

pub mod mfcc;
pub mod pitch;
pub mod rhythm;
pub mod spectral;
pub mod spectrum;
pub mod temporal;
pub mod voice_quality;

use thiserror::Error;

use crate::audio_io::AudioError;

pub use mfcc::{mfcc, MelFilterbank, MfccExtractor};
pub use pitch::{f0_track, f0_track_with, PitchConfig};
pub use rhythm::{tempogram_tempo, tempogram_tempo_with, TempoConfig, TempoEstimate};
pub use spectral::{
    poly_features, spectral_contrast, spectral_flux_onset, spectral_shape, SpectralShape,
};
pub use spectrum::{power_spectrum, Spectrum, SpectrumAnalyzer};
pub use temporal::{frame_scalars, FrameScalars};
pub use voice_quality::{analyze_voice_quality, jitter_shimmer_hnr, JitterShimmerReport, VoiceQuality};

/// Floor applied before any logarithm.
pub const SPECTRAL_FLOOR: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum AcousticError {
    #[error("FFT size {0} must be a power of two no smaller than the frame")]
    InvalidFftSize(usize),
    #[error("invalid pitch range: f_min {f_min} Hz, f_max {f_max} Hz")]
    InvalidRange { f_min: f64, f_max: f64 },
    #[error("invalid band configuration: {0}")]
    InvalidBandConfig(String),
    #[error("need at least 2 frames, got {0}")]
    TooFewFrames(usize),
    #[error("invalid polynomial order {0}")]
    InvalidOrder(usize),
    #[error(transparent)]
    Audio(#[from] AudioError),
}

/// Time-indexed values of one descriptor. `NaN` marks frames where the
/// descriptor is undefined (e.g. F0 in unvoiced frames).
///
/// Cycle-based series (jitter, shimmer) carry `hop_seconds == 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSeries {
    pub name: String,
    pub values: Vec<f64>,
    pub hop_seconds: f64,
    pub frame_seconds: f64,
}

impl FrameSeries {
    pub fn new(name: impl Into<String>, values: Vec<f64>, hop_seconds: f64) -> Self {
        Self {
            name: name.into(),
            values,
            hop_seconds,
            frame_seconds: hop_seconds,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}
