//! Per-frame spectral shape descriptors.

use nalgebra::{DMatrix, DVector};

use super::{AcousticError, FrameSeries, Spectrum, SPECTRAL_FLOOR};

pub const DEFAULT_ROLLOFF: f64 = 0.85;
pub const DEFAULT_CONTRAST_QUANTILE: f64 = 0.02;
pub const DEFAULT_CONTRAST_FMIN: f64 = 200.0;
pub const DEFAULT_CONTRAST_BANDS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralShape {
    pub centroid_hz: f64,
    pub bandwidth_hz: f64,
    pub rolloff_hz: f64,
    pub flatness: f64,
}

impl SpectralShape {
    const UNDEFINED: Self = Self {
        centroid_hz: f64::NAN,
        bandwidth_hz: f64::NAN,
        rolloff_hz: f64::NAN,
        flatness: f64::NAN,
    };
}

pub fn spectral_shape(spec: &Spectrum) -> SpectralShape {
    spectral_shape_with(spec, DEFAULT_ROLLOFF)
}

/// Centroid and bandwidth weight bins by magnitude; rolloff accumulates power
/// (|X|^2); flatness is the geometric over arithmetic mean of floored power.
/// A silent spectrum yields all-NaN.
pub fn spectral_shape_with(spec: &Spectrum, rolloff_fraction: f64) -> SpectralShape {
    let total_mag: f64 = spec.magnitudes.iter().sum();
    if total_mag <= 0.0 {
        return SpectralShape::UNDEFINED;
    }
    let freqs = || (0..spec.n_bins()).map(|k| spec.freq(k));
    let centroid = freqs()
        .zip(&spec.magnitudes)
        .map(|(f, m)| f * m)
        .sum::<f64>()
        / total_mag;
    let bandwidth = (freqs()
        .zip(&spec.magnitudes)
        .map(|(f, m)| m * (f - centroid).powi(2))
        .sum::<f64>()
        / total_mag)
        .sqrt();

    let total_power: f64 = spec.power().sum();
    let target = rolloff_fraction * total_power;
    let mut acc = 0.0;
    let mut rolloff = spec.nyquist_hz();
    for (k, p) in spec.power().enumerate() {
        acc += p;
        if acc >= target {
            rolloff = spec.freq(k);
            break;
        }
    }

    SpectralShape {
        centroid_hz: centroid,
        bandwidth_hz: bandwidth,
        rolloff_hz: rolloff,
        flatness: flatness(&spec.power().collect::<Vec<_>>()),
    }
}

fn flatness(power: &[f64]) -> f64 {
    let first = power.first().copied().unwrap_or(0.0);
    if power.iter().all(|p| *p == first) {
        return 1.0;
    }
    let n = power.len() as f64;
    let floored = || power.iter().map(|p| p.max(SPECTRAL_FLOOR));
    let log_mean = floored().map(f64::ln).sum::<f64>() / n;
    let arith = floored().sum::<f64>() / n;
    (log_mean.exp() / arith).clamp(0.0, 1.0)
}

/// Octave sub-band contrast. Band 0 covers `[0, fmin)`, band `i` covers
/// `[fmin·2^(i-1), fmin·2^i)`, and the last band extends to Nyquist.
pub fn spectral_contrast(spec: &Spectrum, n_bands: usize) -> Vec<f64> {
    spectral_contrast_with(spec, n_bands, DEFAULT_CONTRAST_FMIN, DEFAULT_CONTRAST_QUANTILE)
}

pub fn spectral_contrast_with(
    spec: &Spectrum,
    n_bands: usize,
    fmin: f64,
    quantile: f64,
) -> Vec<f64> {
    (0..n_bands)
        .map(|band| {
            let lo = if band == 0 { 0.0 } else { fmin * 2f64.powi(band as i32 - 1) };
            let hi = if band + 1 == n_bands {
                f64::INFINITY
            } else {
                fmin * 2f64.powi(band as i32)
            };
            let range = spec.band(lo, hi);
            if range.is_empty() {
                return f64::NAN;
            }
            let mut mags = spec.magnitudes[range].to_vec();
            mags.sort_by(f64::total_cmp);
            let q = ((quantile * mags.len() as f64).floor() as usize).max(1);
            let valley = mags[..q].iter().sum::<f64>() / q as f64;
            let peak = mags[mags.len() - q..].iter().sum::<f64>() / q as f64;
            peak.max(SPECTRAL_FLOOR).ln() - valley.max(SPECTRAL_FLOOR).ln()
        })
        .collect()
}

/// Half-wave rectified log-magnitude difference, averaged over bins.
/// The first frame is 0.
pub fn spectral_flux_onset(
    spectrogram: &[Spectrum],
    hop_seconds: f64,
) -> Result<FrameSeries, AcousticError> {
    if spectrogram.len() < 2 {
        return Err(AcousticError::TooFewFrames(spectrogram.len()));
    }
    let log_mag = |s: &Spectrum| -> Vec<f64> {
        s.magnitudes
            .iter()
            .map(|m| m.max(SPECTRAL_FLOOR).ln())
            .collect()
    };
    let mut values = Vec::with_capacity(spectrogram.len());
    values.push(0.0);
    let mut prev = log_mag(&spectrogram[0]);
    for s in &spectrogram[1..] {
        let cur = log_mag(s);
        let flux = cur
            .iter()
            .zip(&prev)
            .map(|(c, p)| (c - p).max(0.0))
            .sum::<f64>()
            / cur.len() as f64;
        values.push(flux);
        prev = cur;
    }
    Ok(FrameSeries {
        name: "onset_strength".into(),
        values,
        hop_seconds,
        frame_seconds: hop_seconds,
    })
}

/// Least-squares polynomial coefficients of magnitude against bin frequency,
/// in ascending order `[c0, c1, ..]`.
pub fn poly_features(spec: &Spectrum, order: usize) -> Result<Vec<f64>, AcousticError> {
    let freqs: Vec<f64> = (0..spec.n_bins()).map(|k| spec.freq(k)).collect();
    poly_fit(&freqs, &spec.magnitudes, order)
}

/// Polynomial least squares for `order` in `0..=2`. The abscissa is scaled
/// to `[-1, 1]` before solving and coefficients are mapped back.
pub fn poly_fit(x: &[f64], y: &[f64], order: usize) -> Result<Vec<f64>, AcousticError> {
    if order > 2 {
        return Err(AcousticError::InvalidOrder(order));
    }
    if x.len() != y.len() || x.len() < order + 1 {
        return Err(AcousticError::InvalidOrder(order));
    }
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let design = DMatrix::from_fn(x.len(), order + 1, |i, j| (x[i] / scale).powi(j as i32));
    let rhs = DVector::from_column_slice(y);
    let svd = design.svd(true, true);
    let sol = svd
        .solve(&rhs, 1e-14)
        .map_err(|_| AcousticError::InvalidOrder(order))?;
    Ok((0..=order)
        .map(|j| sol[j] / scale.powi(j as i32))
        .collect())
}

/// Shannon entropy of the normalised power distribution divided by
/// `ln(n_bins)`, in `[0, 1]`. NaN for a silent frame.
pub fn spectral_entropy(spec: &Spectrum) -> f64 {
    let total: f64 = spec.power().sum();
    if total <= 0.0 || spec.n_bins() < 2 {
        return f64::NAN;
    }
    let h: f64 = spec
        .power()
        .filter(|p| *p > 0.0)
        .map(|p| {
            let q = p / total;
            -q * q.ln()
        })
        .sum();
    (h / (spec.n_bins() as f64).ln()).clamp(0.0, 1.0)
}

/// Power in `[50, 1000)` Hz over power in `[1000, 5000)` Hz, in dB.
pub fn alpha_ratio_db(spec: &Spectrum) -> f64 {
    let low: f64 = spec.magnitudes[spec.band(50.0, 1000.0)].iter().map(|m| m * m).sum();
    let high: f64 = spec.magnitudes[spec.band(1000.0, 5000.0)].iter().map(|m| m * m).sum();
    if low + high <= 0.0 {
        return f64::NAN;
    }
    10.0 * (low.max(SPECTRAL_FLOOR) / high.max(SPECTRAL_FLOOR)).log10()
}

/// Peak magnitude in `[0, 2000)` Hz over peak magnitude in `[2000, 5000)` Hz, in dB.
pub fn hammarberg_index_db(spec: &Spectrum) -> f64 {
    let peak = |r: std::ops::Range<usize>| spec.magnitudes[r].iter().fold(0.0f64, |a, &b| a.max(b));
    let low = peak(spec.band(0.0, 2000.0));
    let high = peak(spec.band(2000.0, 5000.0));
    if low + high <= 0.0 {
        return f64::NAN;
    }
    20.0 * (low.max(SPECTRAL_FLOOR) / high.max(SPECTRAL_FLOOR)).log10()
}

/// Linear slope of magnitude vs frequency over `[lo_hz, hi_hz)`.
pub fn band_slope(spec: &Spectrum, lo_hz: f64, hi_hz: f64) -> f64 {
    let range = spec.band(lo_hz, hi_hz);
    let freqs: Vec<f64> = range.clone().map(|k| spec.freq(k)).collect();
    poly_fit(&freqs, &spec.magnitudes[range], 1)
        .map(|c| c[1])
        .unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_with(n_bins: usize, bin_hz: f64, f: impl Fn(usize) -> f64) -> Spectrum {
        Spectrum {
            magnitudes: (0..n_bins).map(f).collect(),
            bin_hz,
        }
    }

    #[test]
    fn point_mass_shape() {
        let s = spec_with(257, 31.25, |k| if k == 32 { 3.0 } else { 0.0 });
        let sh = spectral_shape(&s);
        assert_eq!(sh.centroid_hz, 1000.0);
        assert_eq!(sh.bandwidth_hz, 0.0);
        assert_eq!(sh.rolloff_hz, 1000.0);
        assert!(sh.flatness < 1e-6);
    }

    #[test]
    fn flat_shape() {
        let s = spec_with(257, 31.25, |_| 0.3);
        let sh = spectral_shape(&s);
        assert_eq!(sh.flatness, 1.0);
        let mean_f = (0..257).map(|k| k as f64 * 31.25).sum::<f64>() / 257.0;
        assert!((sh.centroid_hz - mean_f).abs() < 1e-9);
    }

    #[test]
    fn two_bins_centroid_and_bandwidth() {
        // bins at 500 and 1500 Hz with equal weight
        let s = spec_with(11, 250.0, |k| if k == 2 || k == 6 { 1.0 } else { 0.0 });
        let sh = spectral_shape(&s);
        assert!((sh.centroid_hz - 1000.0).abs() < 1e-12);
        assert!((sh.bandwidth_hz - 500.0).abs() < 1e-12);
    }

    #[test]
    fn silent_shape_is_nan() {
        let sh = spectral_shape(&spec_with(9, 100.0, |_| 0.0));
        assert!(sh.centroid_hz.is_nan() && sh.flatness.is_nan() && sh.rolloff_hz.is_nan());
    }

    #[test]
    fn contrast_flat_and_zero() {
        let flat = spec_with(257, 31.25, |_| 0.7);
        assert!(spectral_contrast(&flat, 6).iter().all(|c| *c == 0.0));
        let zero = spec_with(257, 31.25, |_| 0.0);
        assert!(spectral_contrast(&zero, 6).iter().all(|c| *c == 0.0));
    }

    #[test]
    fn contrast_single_peak() {
        // band 3 = [800, 1600) Hz holds 26 bins at 31.25 Hz
        let s = spec_with(257, 31.25, |k| if k == 40 { 1.0 } else { 1e-6 });
        let c = spectral_contrast(&s, 6);
        assert!((c[3] - (1.0f64 / 1e-6).ln()).abs() < 1e-9, "{}", c[3]);
        assert!((c[3] - 13.8155).abs() < 1e-3);
        assert_eq!(c[0], 0.0);
    }

    #[test]
    fn flux_behaviour() {
        let tone = spec_with(9, 100.0, |k| if k == 3 { 1.0 } else { 0.0 });
        let silence = spec_with(9, 100.0, |_| 0.0);
        let constant = vec![tone.clone(); 4];
        let f = spectral_flux_onset(&constant, 0.01).unwrap();
        assert!(f.values.iter().all(|v| *v == 0.0));

        let seq = vec![silence.clone(), silence.clone(), tone.clone(), tone.clone()];
        let f = spectral_flux_onset(&seq, 0.01).unwrap();
        assert_eq!(f.values[0], 0.0);
        assert_eq!(f.values[1], 0.0);
        assert!(f.values[2] > 0.0);
        assert_eq!(f.values[3], 0.0);

        let decaying: Vec<Spectrum> = (0..5)
            .map(|t| spec_with(9, 100.0, |_| 1.0 / (1 + t) as f64))
            .collect();
        let f = spectral_flux_onset(&decaying, 0.01).unwrap();
        assert!(f.values.iter().all(|v| *v == 0.0));

        assert!(matches!(
            spectral_flux_onset(&[tone], 0.01),
            Err(AcousticError::TooFewFrames(1))
        ));
    }

    #[test]
    fn poly_flat_and_linear() {
        let flat = spec_with(129, 62.5, |_| 0.4);
        let c = poly_features(&flat, 1).unwrap();
        assert!((c[0] - 0.4).abs() < 1e-12);
        assert!(c[1].abs() < 1e-12);

        let lin = spec_with(129, 62.5, |k| 0.25 + 3e-4 * k as f64 * 62.5);
        let c = poly_features(&lin, 1).unwrap();
        assert!((c[0] - 0.25).abs() < 1e-9);
        assert!((c[1] - 3e-4).abs() < 1e-9);
    }

    #[test]
    fn poly_quadratic_matches_normal_equations() {
        let s = spec_with(64, 10.0, |k| {
            let f = k as f64 * 10.0;
            1.5 - 2e-3 * f + 4e-6 * f * f
        });
        let c = poly_features(&s, 2).unwrap();
        // residual of the fitted curve
        let max_res = (0..64)
            .map(|k| {
                let f = k as f64 * 10.0;
                (c[0] + c[1] * f + c[2] * f * f - s.magnitudes[k]).abs()
            })
            .fold(0.0, f64::max);
        assert!(max_res < 1e-9, "{max_res}");
        // independent solve of the 3x3 normal equations by Cramer's rule
        let xs: Vec<f64> = (0..64).map(|k| k as f64 * 10.0).collect();
        let sums: Vec<f64> = (0..5).map(|p| xs.iter().map(|x| x.powi(p)).sum()).collect();
        let rhs: Vec<f64> = (0..3)
            .map(|p| xs.iter().zip(&s.magnitudes).map(|(x, y)| x.powi(p) * y).sum())
            .collect();
        let m = [
            [sums[0], sums[1], sums[2]],
            [sums[1], sums[2], sums[3]],
            [sums[2], sums[3], sums[4]],
        ];
        let det3 = |m: [[f64; 3]; 3]| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let d = det3(m);
        for j in 0..3 {
            let mut mj = m;
            for i in 0..3 {
                mj[i][j] = rhs[i];
            }
            let cj = det3(mj) / d;
            assert!((cj - c[j]).abs() <= 1e-6 * cj.abs().max(1e-6), "{j}: {cj} vs {}", c[j]);
        }
    }

    #[test]
    fn poly_order_errors() {
        let s = spec_with(2, 10.0, |_| 1.0);
        assert!(matches!(poly_features(&s, 3), Err(AcousticError::InvalidOrder(3))));
        assert!(poly_features(&s, 2).is_err());
    }

    #[test]
    fn entropy_bounds() {
        let flat = spec_with(65, 10.0, |_| 1.0);
        assert!((spectral_entropy(&flat) - 1.0).abs() < 1e-12);
        let peak = spec_with(65, 10.0, |k| if k == 5 { 1.0 } else { 0.0 });
        assert_eq!(spectral_entropy(&peak), 0.0);
    }
}
