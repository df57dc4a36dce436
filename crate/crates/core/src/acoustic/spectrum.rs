use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::AcousticError;

/// One-sided magnitude spectrum over bins `0..=n_fft/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub magnitudes: Vec<f64>,
    pub bin_hz: f64,
}

impl Spectrum {
    pub fn n_bins(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn n_fft(&self) -> usize {
        2 * (self.magnitudes.len() - 1)
    }

    pub fn freq(&self, bin: usize) -> f64 {
        bin as f64 * self.bin_hz
    }

    pub fn nyquist_hz(&self) -> f64 {
        self.freq(self.n_bins() - 1)
    }

    pub fn power(&self) -> impl Iterator<Item = f64> + '_ {
        self.magnitudes.iter().map(|m| m * m)
    }

    /// Sum of |X[k]|^2 over the full two-sided transform, reconstructed from
    /// the one-sided half using conjugate symmetry of a real input.
    pub fn full_energy(&self) -> f64 {
        let last = self.n_bins() - 1;
        self.magnitudes
            .iter()
            .enumerate()
            .map(|(k, m)| {
                let p = m * m;
                if k == 0 || k == last {
                    p
                } else {
                    2.0 * p
                }
            })
            .sum()
    }

    /// Bins whose centre frequency lies in `[lo_hz, hi_hz)`.
    pub fn band(&self, lo_hz: f64, hi_hz: f64) -> std::ops::Range<usize> {
        let start = (lo_hz / self.bin_hz).ceil().max(0.0) as usize;
        let end = ((hi_hz / self.bin_hz).ceil().max(0.0) as usize).min(self.n_bins());
        start.min(end)..end
    }
}

/// Reusable real-input FFT for a fixed transform size.
#[derive(Clone)]
pub struct SpectrumAnalyzer {
    n_fft: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectrumAnalyzer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectrumAnalyzer")
            .field("n_fft", &self.n_fft)
            .finish()
    }
}

impl SpectrumAnalyzer {
    pub fn new(n_fft: usize) -> Result<Self, AcousticError> {
        if n_fft < 2 || !n_fft.is_power_of_two() {
            return Err(AcousticError::InvalidFftSize(n_fft));
        }
        let fft = FftPlanner::new().plan_fft_forward(n_fft);
        Ok(Self { n_fft, fft })
    }

    pub fn n_fft(&self) -> usize {
        self.n_fft
    }

    /// Zero-pads `frame` to `n_fft` and returns the full complex transform.
    pub fn transform(&self, frame: &[f64]) -> Result<Vec<Complex<f64>>, AcousticError> {
        if frame.len() > self.n_fft {
            return Err(AcousticError::InvalidFftSize(self.n_fft));
        }
        let mut buf: Vec<Complex<f64>> = frame
            .iter()
            .map(|&x| Complex::new(x, 0.0))
            .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
            .take(self.n_fft)
            .collect();
        self.fft.process(&mut buf);
        Ok(buf)
    }

    pub fn spectrum(&self, frame: &[f64], sample_rate_hz: u32) -> Result<Spectrum, AcousticError> {
        let full = self.transform(frame)?;
        Ok(Spectrum {
            magnitudes: full[..=self.n_fft / 2].iter().map(|c| c.norm()).collect(),
            bin_hz: sample_rate_hz as f64 / self.n_fft as f64,
        })
    }
}

/// Magnitude spectrum of one windowed frame, zero-padded to `n_fft`.
///
/// `bin_hz` is expressed per sample (`1 / n_fft`); use
/// [`SpectrumAnalyzer::spectrum`] to attach a sample rate.
pub fn power_spectrum(frame: &[f64], n_fft: usize) -> Result<Spectrum, AcousticError> {
    let analyzer = SpectrumAnalyzer::new(n_fft)?;
    let mut spec = analyzer.spectrum(frame, 1)?;
    spec.bin_hz = 1.0 / n_fft as f64;
    Ok(spec)
}

/// Smallest power of two `>= n`.
pub fn fft_size_for(n: usize) -> usize {
    n.max(2).next_power_of_two()
}
