//! The "gemaps-core" voice set and the spectral/rhythm set.

use super::{apply_bank, FeatureVector, FunctionalBank};
use crate::acoustic::spectral::{
    alpha_ratio_db, band_slope, hammarberg_index_db, spectral_contrast_with, spectral_entropy,
    spectral_shape_with, DEFAULT_CONTRAST_BANDS, DEFAULT_CONTRAST_FMIN, DEFAULT_CONTRAST_QUANTILE,
    DEFAULT_ROLLOFF,
};
use crate::acoustic::spectrum::fft_size_for;
use crate::acoustic::{
    analyze_voice_quality, f0_track_with, frame_scalars, poly_features, spectral_flux_onset,
    tempogram_tempo_with, AcousticError, FrameSeries, MfccExtractor, PitchConfig, Spectrum,
    SpectrumAnalyzer, TempoConfig,
};
use crate::audio_io::{frame_signal, AudioBuffer, FrameConfig, FrameMatrix};

/// Reference frequency for the semitone scale (A0).
const SEMITONE_REF_HZ: f64 = 27.5;

/// Frame-level descriptors summarised by the gemaps-core bank, in output order.
pub const GEMAPS_LLDS: [&str; 13] = [
    "f0_semitone",
    "jitter",
    "shimmer",
    "hnr",
    "rms",
    "slope_0_500",
    "slope_500_1500",
    "alpha_ratio",
    "hammarberg_index",
    "mfcc1",
    "mfcc2",
    "mfcc3",
    "mfcc4",
];

/// Utterance-level scalars appended after the summarised descriptors.
pub const GEMAPS_SCALARS: [&str; 4] = ["voiced_fraction", "jitter_local", "shimmer_local", "hnr_db"];

/// Spectral-set descriptors other than the per-band contrast, in output
/// order. Contrast bands are inserted after `bandwidth`.
pub const SPECTRAL_LLDS: [&str; 11] = [
    "centroid",
    "bandwidth",
    "flatness",
    "rolloff",
    "entropy",
    "onset_strength",
    "rms",
    "zcr",
    "poly_c0",
    "poly_c1",
    "tempo_bpm",
];

const SPECTRAL_PREFIX: &str = "spec_";

#[derive(Debug, Clone, PartialEq)]
pub struct AcousticConfig {
    pub frame: FrameConfig,
    pub f0_min_hz: f64,
    pub f0_max_hz: f64,
    pub voicing_threshold: f64,
    pub n_mels: usize,
    pub mfcc_fmin_hz: f64,
    /// `None` means Nyquist.
    pub mfcc_fmax_hz: Option<f64>,
    pub contrast_bands: usize,
    pub contrast_fmin_hz: f64,
    pub contrast_quantile: f64,
    pub rolloff_fraction: f64,
    pub tempo: TempoConfig,
    pub gemaps_bank: FunctionalBank,
    pub spectral_bank: FunctionalBank,
}

impl Default for AcousticConfig {
    fn default() -> Self {
        Self {
            frame: FrameConfig::default(),
            f0_min_hz: 60.0,
            f0_max_hz: 600.0,
            voicing_threshold: crate::acoustic::pitch::DEFAULT_VOICING_THRESHOLD,
            n_mels: 26,
            mfcc_fmin_hz: 20.0,
            mfcc_fmax_hz: None,
            contrast_bands: DEFAULT_CONTRAST_BANDS,
            contrast_fmin_hz: DEFAULT_CONTRAST_FMIN,
            contrast_quantile: DEFAULT_CONTRAST_QUANTILE,
            rolloff_fraction: DEFAULT_ROLLOFF,
            tempo: TempoConfig::default(),
            gemaps_bank: FunctionalBank::mean_stddev(),
            spectral_bank: FunctionalBank::summary(),
        }
    }
}

pub fn gemaps_feature_names(cfg: &AcousticConfig) -> Vec<String> {
    GEMAPS_LLDS
        .iter()
        .flat_map(|lld| cfg.gemaps_bank.names(lld))
        .chain(GEMAPS_SCALARS.iter().map(|s| s.to_string()))
        .collect()
}

fn spectral_series_names(cfg: &AcousticConfig) -> Vec<String> {
    let mut names = vec!["centroid".to_string(), "bandwidth".to_string()];
    names.extend((0..cfg.contrast_bands).map(|b| format!("contrast_b{b}")));
    names.extend(
        SPECTRAL_LLDS[2..SPECTRAL_LLDS.len() - 1]
            .iter()
            .map(|s| s.to_string()),
    );
    names
}

pub fn spectral_feature_names(cfg: &AcousticConfig) -> Vec<String> {
    spectral_series_names(cfg)
        .iter()
        .flat_map(|s| cfg.spectral_bank.names(&format!("{SPECTRAL_PREFIX}{s}")))
        .chain(std::iter::once(format!("{SPECTRAL_PREFIX}tempo_bpm")))
        .collect()
}

/// Frames and spectra of one recording, shared by both feature sets.
#[derive(Debug, Clone)]
pub struct FrameAnalysis<'a> {
    buf: &'a AudioBuffer,
    cfg: &'a AcousticConfig,
    frames: FrameMatrix,
    spectra: Vec<Spectrum>,
}

impl<'a> FrameAnalysis<'a> {
    pub fn new(buf: &'a AudioBuffer, cfg: &'a AcousticConfig) -> Result<Self, AcousticError> {
        let (frame_len, hop) = cfg.frame.to_samples(buf.sample_rate_hz());
        let frames = frame_signal(buf, frame_len, hop, cfg.frame.window)?;
        let analyzer = SpectrumAnalyzer::new(fft_size_for(frame_len))?;
        let spectra = frames
            .iter()
            .map(|f| analyzer.spectrum(f, buf.sample_rate_hz()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            buf,
            cfg,
            frames,
            spectra,
        })
    }

    fn series(&self, name: &str, values: Vec<f64>) -> FrameSeries {
        FrameSeries {
            name: name.into(),
            values,
            hop_seconds: self.frames.hop_seconds(),
            frame_seconds: self.frames.frame_len() as f64 / self.buf.sample_rate_hz() as f64,
        }
    }

    fn per_frame(&self, name: &str, f: impl Fn(&Spectrum) -> f64) -> FrameSeries {
        self.series(name, self.spectra.iter().map(f).collect())
    }

    pub fn gemaps_core(&self) -> Result<FeatureVector, AcousticError> {
        let cfg = self.cfg;
        let pitch_cfg = PitchConfig {
            f_min_hz: cfg.f0_min_hz,
            f_max_hz: cfg.f0_max_hz,
            threshold: cfg.voicing_threshold,
            hop_ms: cfg.frame.hop_ms,
        };
        let f0 = f0_track_with(self.buf, &pitch_cfg)?;
        let vq = analyze_voice_quality(self.buf, &f0);
        let semitones = f0
            .values
            .iter()
            .map(|f| 12.0 * (f / SEMITONE_REF_HZ).log2())
            .collect();
        let scalars = frame_scalars(&self.frames);
        let nyquist = self.buf.sample_rate_hz() as f64 / 2.0;
        let mfcc = MfccExtractor::new(
            self.spectra[0].n_bins(),
            self.spectra[0].bin_hz,
            cfg.n_mels,
            5,
            cfg.mfcc_fmin_hz,
            cfg.mfcc_fmax_hz.unwrap_or(nyquist),
        )?;
        let cepstra: Vec<Vec<f64>> = self.spectra.iter().map(|s| mfcc.compute(s)).collect();
        let mfcc_series =
            |k: usize| self.series(&format!("mfcc{k}"), cepstra.iter().map(|c| c[k]).collect());

        let llds = [
            FrameSeries { name: "f0_semitone".into(), values: semitones, ..f0.clone() },
            vq.jitter_series.clone(),
            vq.shimmer_series.clone(),
            vq.hnr_series.clone().renamed("hnr"),
            scalars.rms.renamed("rms"),
            self.per_frame("slope_0_500", |s| band_slope(s, 0.0, 500.0)),
            self.per_frame("slope_500_1500", |s| band_slope(s, 500.0, 1500.0)),
            self.per_frame("alpha_ratio", alpha_ratio_db),
            self.per_frame("hammarberg_index", hammarberg_index_db),
            mfcc_series(1),
            mfcc_series(2),
            mfcc_series(3),
            mfcc_series(4),
        ];
        debug_assert!(llds.iter().zip(GEMAPS_LLDS).all(|(s, n)| s.name == n));

        let mut fv = FeatureVector::new(self.buf.source_id());
        for s in &llds {
            fv.extend(apply_bank(s, &cfg.gemaps_bank));
        }
        let voiced = f0.values.iter().filter(|v| !v.is_nan()).count();
        let voiced_fraction = if f0.values.is_empty() {
            f64::NAN
        } else {
            voiced as f64 / f0.values.len() as f64
        };
        fv.push("voiced_fraction", voiced_fraction);
        fv.push("jitter_local", vq.report.jitter_local);
        fv.push("shimmer_local", vq.report.shimmer_local);
        fv.push("hnr_db", vq.report.hnr_db);
        Ok(fv)
    }

    pub fn spectral_set(&self) -> Result<FeatureVector, AcousticError> {
        let cfg = self.cfg;
        let shapes: Vec<_> = self
            .spectra
            .iter()
            .map(|s| spectral_shape_with(s, cfg.rolloff_fraction))
            .collect();
        let contrasts: Vec<Vec<f64>> = self
            .spectra
            .iter()
            .map(|s| {
                spectral_contrast_with(s, cfg.contrast_bands, cfg.contrast_fmin_hz, cfg.contrast_quantile)
            })
            .collect();
        let scalars = frame_scalars(&self.frames);
        let polys: Vec<Vec<f64>> = self
            .spectra
            .iter()
            .map(|s| poly_features(s, 1).unwrap_or_else(|_| vec![f64::NAN; 2]))
            .collect();
        let hop_seconds = self.frames.hop_seconds();
        let onset = if self.spectra.len() >= 2 {
            spectral_flux_onset(&self.spectra, hop_seconds)?
        } else {
            self.series("onset_strength", vec![f64::NAN; self.spectra.len()])
        };
        let tempo = tempogram_tempo_with(&onset, hop_seconds, &cfg.tempo).tempo_bpm;

        let mut llds = vec![
            self.series("centroid", shapes.iter().map(|s| s.centroid_hz).collect()),
            self.series("bandwidth", shapes.iter().map(|s| s.bandwidth_hz).collect()),
        ];
        for b in 0..cfg.contrast_bands {
            llds.push(self.series(&format!("contrast_b{b}"), contrasts.iter().map(|c| c[b]).collect()));
        }
        llds.extend([
            self.series("flatness", shapes.iter().map(|s| s.flatness).collect()),
            self.series("rolloff", shapes.iter().map(|s| s.rolloff_hz).collect()),
            self.per_frame("entropy", spectral_entropy),
            onset.renamed("onset_strength"),
            scalars.rms,
            scalars.zcr,
            self.series("poly_c0", polys.iter().map(|p| p[0]).collect()),
            self.series("poly_c1", polys.iter().map(|p| p[1]).collect()),
        ]);

        let mut fv = FeatureVector::new(self.buf.source_id());
        for s in llds {
            let name = format!("{SPECTRAL_PREFIX}{}", s.name);
            fv.extend(apply_bank(&s.renamed(name), &cfg.spectral_bank));
        }
        fv.push(format!("{SPECTRAL_PREFIX}tempo_bpm"), tempo);
        Ok(fv)
    }
}

/// Voice-quality oriented set: F0 (semitones re 27.5 Hz), jitter, shimmer,
/// HNR, RMS loudness proxy, band spectral slopes, alpha ratio, Hammarberg
/// index and MFCC 1-4, each summarised by `cfg.gemaps_bank`, followed by
/// four utterance-level scalars.
pub fn gemaps_core(buf: &AudioBuffer, cfg: &AcousticConfig) -> Result<FeatureVector, AcousticError> {
    FrameAnalysis::new(buf, cfg)?.gemaps_core()
}

/// Spectral shape, contrast, entropy, onset strength, RMS, ZCR and linear
/// spectral fit, each summarised by `cfg.spectral_bank`, plus tempo.
pub fn spectral_set(buf: &AudioBuffer, cfg: &AcousticConfig) -> Result<FeatureVector, AcousticError> {
    FrameAnalysis::new(buf, cfg)?.spectral_set()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_signals::{sine, vowel, white_noise};
    use std::collections::HashSet;

    #[test]
    fn sine_semitone_and_voicing() {
        let cfg = AcousticConfig::default();
        let fv = gemaps_core(&sine(440.0, 0.5, 16000, 1.0), &cfg).unwrap();
        let expected = 12.0 * (440.0f64 / 27.5).log2();
        assert!((expected - 48.0).abs() < 1e-12);
        let st = fv.get("f0_semitone_mean").unwrap();
        assert!((st - 48.0).abs() < 0.1, "{st}");
        assert!(fv.get("voiced_fraction").unwrap() > 0.95);
    }

    #[test]
    fn silence_contracts() {
        let cfg = AcousticConfig::default();
        let buf = AudioBuffer::new(vec![0.0; 16000], 16000, "quiet").unwrap();
        let g = gemaps_core(&buf, &cfg).unwrap();
        assert_eq!(g.get("voiced_fraction"), Some(0.0));
        for name in ["f0_semitone_mean", "f0_semitone_stddev", "jitter_local", "shimmer_local", "hnr_db"] {
            assert!(g.get(name).unwrap().is_nan(), "{name}");
        }
        assert_eq!(g.get("rms_mean"), Some(0.0));
        let s = spectral_set(&buf, &cfg).unwrap();
        assert_eq!(s.get("spec_zcr_mean"), Some(0.0));
        assert_eq!(s.get("spec_rms_max"), Some(0.0));
        assert!(s.get("spec_centroid_mean").unwrap().is_nan());
        assert!(s.get("spec_tempo_bpm").unwrap().is_nan());
    }

    #[test]
    fn deterministic_output() {
        let cfg = AcousticConfig::default();
        let buf = vowel(120.0, 16000, 1.0, 4);
        let a = gemaps_core(&buf, &cfg).unwrap();
        let b = gemaps_core(&buf, &cfg).unwrap();
        assert_eq!(a.names(), b.names());
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        let a = spectral_set(&buf, &cfg).unwrap();
        let b = spectral_set(&buf, &cfg).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn noise_is_flat() {
        let fv = spectral_set(&white_noise(16000, 1.0, 0.5, 21), &AcousticConfig::default()).unwrap();
        let flat = fv.get("spec_flatness_mean").unwrap();
        assert!(flat > 0.5, "{flat}");
    }

    #[test]
    fn tone_centroid() {
        let fv = spectral_set(&sine(1000.0, 0.5, 16000, 1.0), &AcousticConfig::default()).unwrap();
        let c = fv.get("spec_centroid_mean").unwrap();
        assert!((c - 1000.0).abs() < 50.0, "{c}");
    }

    #[test]
    fn golden_names() {
        let cfg = AcousticConfig::default();
        let g = gemaps_feature_names(&cfg);
        let s = spectral_feature_names(&cfg);
        assert_eq!(g.len(), 13 * 2 + 4);
        assert_eq!(s.len(), (11 - 1 + 6) * 5 + 1);
        assert_eq!(&g[..4], &["f0_semitone_mean", "f0_semitone_stddev", "jitter_mean", "jitter_stddev"]);
        assert_eq!(g.last().unwrap(), "hnr_db");
        assert_eq!(&s[..2], &["spec_centroid_mean", "spec_centroid_stddev"]);
        assert_eq!(s[10], "spec_contrast_b0_mean");
        assert_eq!(s.last().unwrap(), "spec_tempo_bpm");
        let gs: HashSet<_> = g.iter().collect();
        let ss: HashSet<_> = s.iter().collect();
        assert_eq!(gs.len(), g.len());
        assert_eq!(ss.len(), s.len());
        assert!(gs.is_disjoint(&ss));

        let buf = vowel(150.0, 16000, 0.5, 2);
        assert_eq!(gemaps_core(&buf, &cfg).unwrap().names(), g.as_slice());
        assert_eq!(spectral_set(&buf, &cfg).unwrap().names(), s.as_slice());
    }

    #[test]
    fn too_short_for_a_frame() {
        let buf = AudioBuffer::new(vec![0.1; 100], 16000, "tiny").unwrap();
        assert!(gemaps_core(&buf, &AcousticConfig::default()).is_err());
    }
}
