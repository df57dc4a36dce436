//! Mel filterbank and cepstral coefficients.

use std::f64::consts::PI;

use super::{AcousticError, Spectrum, SPECTRAL_FLOOR};

/// HTK mel scale.
pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular filters over the bins of a one-sided spectrum.
#[derive(Debug, Clone)]
pub struct MelFilterbank {
    /// Per filter: first bin and weights for consecutive bins.
    filters: Vec<(usize, Vec<f64>)>,
    n_bins: usize,
}

impl MelFilterbank {
    pub fn new(
        n_bins: usize,
        bin_hz: f64,
        n_mels: usize,
        fmin: f64,
        fmax: f64,
    ) -> Result<Self, AcousticError> {
        let nyquist = (n_bins.saturating_sub(1)) as f64 * bin_hz;
        if n_mels == 0 {
            return Err(AcousticError::InvalidBandConfig("n_mels must be positive".into()));
        }
        if !(fmin >= 0.0 && fmin < fmax) {
            return Err(AcousticError::InvalidBandConfig(format!(
                "need 0 <= fmin < fmax, got {fmin}..{fmax}"
            )));
        }
        if fmax > nyquist * (1.0 + 1e-12) {
            return Err(AcousticError::InvalidBandConfig(format!(
                "fmax {fmax} above Nyquist {nyquist}"
            )));
        }
        let (mlo, mhi) = (hz_to_mel(fmin), hz_to_mel(fmax));
        let edges: Vec<f64> = (0..n_mels + 2)
            .map(|i| mel_to_hz(mlo + (mhi - mlo) * i as f64 / (n_mels + 1) as f64))
            .collect();
        let filters = edges
            .windows(3)
            .map(|e| {
                let (lo, mid, hi) = (e[0], e[1], e[2]);
                let first = (lo / bin_hz).ceil() as usize;
                let last = ((hi / bin_hz).floor() as usize).min(n_bins - 1);
                let weights = (first..=last)
                    .map(|k| {
                        let f = k as f64 * bin_hz;
                        let up = (f - lo) / (mid - lo);
                        let down = (hi - f) / (hi - mid);
                        up.min(down).max(0.0)
                    })
                    .collect::<Vec<_>>();
                (first, weights)
            })
            .collect();
        Ok(Self { filters, n_bins })
    }

    pub fn n_mels(&self) -> usize {
        self.filters.len()
    }

    /// Filter energies of the power spectrum (|X|^2).
    pub fn apply(&self, spec: &Spectrum) -> Vec<f64> {
        debug_assert_eq!(spec.n_bins(), self.n_bins);
        self.filters
            .iter()
            .map(|(first, w)| {
                w.iter()
                    .zip(&spec.magnitudes[*first..])
                    .map(|(w, m)| w * m * m)
                    .sum()
            })
            .collect()
    }

    /// Natural log of floored filter energies.
    pub fn log_mel(&self, spec: &Spectrum) -> Vec<f64> {
        self.apply(spec)
            .into_iter()
            .map(|e| e.max(SPECTRAL_FLOOR).ln())
            .collect()
    }
}

/// Orthonormal type-II DCT.
pub fn dct_ortho(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let nf = n as f64;
    (0..n)
        .map(|k| {
            let scale = if k == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
            scale
                * x.iter()
                    .enumerate()
                    .map(|(i, v)| v * (PI * k as f64 * (2 * i + 1) as f64 / (2.0 * nf)).cos())
                    .sum::<f64>()
        })
        .collect()
}

/// MFCC extractor with a precomputed filterbank.
#[derive(Debug, Clone)]
pub struct MfccExtractor {
    bank: MelFilterbank,
    n_coeffs: usize,
}

impl MfccExtractor {
    pub fn new(
        n_bins: usize,
        bin_hz: f64,
        n_mels: usize,
        n_coeffs: usize,
        fmin: f64,
        fmax: f64,
    ) -> Result<Self, AcousticError> {
        if n_coeffs == 0 || n_coeffs > n_mels {
            return Err(AcousticError::InvalidBandConfig(format!(
                "n_coeffs {n_coeffs} must be in 1..={n_mels}"
            )));
        }
        Ok(Self {
            bank: MelFilterbank::new(n_bins, bin_hz, n_mels, fmin, fmax)?,
            n_coeffs,
        })
    }

    pub fn compute(&self, spec: &Spectrum) -> Vec<f64> {
        let mut c = dct_ortho(&self.bank.log_mel(spec));
        c.truncate(self.n_coeffs);
        c
    }
}

/// MFCCs of one magnitude spectrum: HTK-mel triangular filters on the power
/// spectrum, log of floored energies, orthonormal DCT-II, first `n_coeffs`.
pub fn mfcc(
    spec: &Spectrum,
    n_mels: usize,
    n_coeffs: usize,
    fmin: f64,
    fmax: f64,
) -> Result<Vec<f64>, AcousticError> {
    Ok(MfccExtractor::new(spec.n_bins(), spec.bin_hz, n_mels, n_coeffs, fmin, fmax)?.compute(spec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spectrum(mags: Vec<f64>) -> Spectrum {
        Spectrum {
            magnitudes: mags,
            bin_hz: 16000.0 / 512.0,
        }
    }

    #[test]
    fn zero_spectrum_gives_constant_cepstrum() {
        let spec = spectrum(vec![0.0; 257]);
        let c = mfcc(&spec, 26, 26, 0.0, 8000.0).unwrap();
        let expect_c0 = (26f64).sqrt() * SPECTRAL_FLOOR.ln();
        assert!((c[0] - expect_c0).abs() < 1e-9);
        for v in &c[1..] {
            assert!(v.abs() < 1e-9, "{v}");
        }
    }

    #[test]
    fn deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let spec = spectrum((0..257).map(|_| rng.gen::<f64>()).collect());
        let a = mfcc(&spec, 40, 13, 20.0, 8000.0).unwrap();
        let b = mfcc(&spec, 40, 13, 20.0, 8000.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn inverse_dct_recovers_log_mel() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let spec = spectrum((0..257).map(|_| rng.gen_range(0.0..3.0)).collect());
        let n_mels = 32;
        let bank = MelFilterbank::new(257, spec.bin_hz, n_mels, 0.0, 8000.0).unwrap();
        let log_mel = bank.log_mel(&spec);
        let c = mfcc(&spec, n_mels, n_mels, 0.0, 8000.0).unwrap();
        // x = D^T c with D the orthonormal DCT-II matrix, built directly
        let n = n_mels as f64;
        for (i, target) in log_mel.iter().enumerate() {
            let mut x = 0.0;
            for (k, ck) in c.iter().enumerate() {
                let s = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
                x += s * (PI * k as f64 * (2 * i + 1) as f64 / (2.0 * n)).cos() * ck;
            }
            assert!((x - target).abs() < 1e-9);
        }
    }

    #[test]
    fn global_gain_shifts_only_c0() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mags: Vec<f64> = (0..257).map(|_| rng.gen_range(0.1..2.0)).collect();
        let a = mfcc(&spectrum(mags.clone()), 26, 13, 50.0, 8000.0).unwrap();
        let b = mfcc(&spectrum(mags.iter().map(|m| m * 2.0).collect()), 26, 13, 50.0, 8000.0)
            .unwrap();
        let shift = (26f64).sqrt() * 2.0 * 2f64.ln();
        assert!((b[0] - a[0] - shift).abs() < 1e-6);
        for k in 1..13 {
            assert!((b[k] - a[k]).abs() < 1e-6);
        }
    }

    #[test]
    fn band_config_errors() {
        let spec = spectrum(vec![1.0; 257]);
        assert!(mfcc(&spec, 10, 11, 0.0, 8000.0).is_err());
        assert!(mfcc(&spec, 10, 5, 0.0, 9000.0).is_err());
        assert!(mfcc(&spec, 10, 5, 500.0, 400.0).is_err());
        assert!(mfcc(&spec, 0, 0, 0.0, 8000.0).is_err());
    }

    #[test]
    fn mel_scale_round_trip() {
        for f in [0.0, 100.0, 700.0, 4000.0] {
            assert!((mel_to_hz(hz_to_mel(f)) - f).abs() < 1e-9);
        }
        assert!((hz_to_mel(700.0) - 2595.0 * 2f64.log10()).abs() < 1e-12);
    }
}
