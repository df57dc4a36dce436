//! Fundamental frequency tracking with the cumulative-mean-normalized
//! difference function.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::{AcousticError, FrameSeries};
use crate::audio_io::AudioBuffer;

/// Absolute threshold on the normalized difference function below which a
/// frame is considered voiced.
pub const DEFAULT_VOICING_THRESHOLD: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchConfig {
    pub f_min_hz: f64,
    pub f_max_hz: f64,
    pub threshold: f64,
    pub hop_ms: f64,
}

impl Default for PitchConfig {
    fn default() -> Self {
        Self {
            f_min_hz: 60.0,
            f_max_hz: 600.0,
            threshold: DEFAULT_VOICING_THRESHOLD,
            hop_ms: 10.0,
        }
    }
}

/// Analysis geometry derived from a [`PitchConfig`] at one sample rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct PitchGeometry {
    pub tau_min: usize,
    pub tau_max: usize,
    /// Integration window of the difference function.
    pub window: usize,
    pub hop: usize,
}

impl PitchGeometry {
    pub fn span(&self) -> usize {
        self.window + self.tau_max
    }

    fn new(cfg: &PitchConfig, sample_rate_hz: u32) -> Self {
        let sr = sample_rate_hz as f64;
        let tau_max = (sr / cfg.f_min_hz).ceil() as usize;
        let tau_min = ((sr / cfg.f_max_hz).floor() as usize).max(2);
        let hop = ((cfg.hop_ms / 1000.0 * sr).round() as usize).max(1);
        Self {
            tau_min,
            tau_max,
            window: tau_max,
            hop,
        }
    }
}

/// F0 track with the default voicing threshold and a 10 ms hop.
pub fn f0_track(buf: &AudioBuffer, f_min: f64, f_max: f64) -> Result<FrameSeries, AcousticError> {
    f0_track_with(
        buf,
        &PitchConfig {
            f_min_hz: f_min,
            f_max_hz: f_max,
            ..PitchConfig::default()
        },
    )
}

/// Per-frame F0 in Hz; `NaN` marks unvoiced frames.
///
/// Each frame spans one maximum period of integration plus the maximum lag.
/// Frame `i` starts at sample `i * hop`.
pub fn f0_track_with(buf: &AudioBuffer, cfg: &PitchConfig) -> Result<FrameSeries, AcousticError> {
    let sr = buf.sample_rate_hz() as f64;
    if !(cfg.f_min_hz > 0.0 && cfg.f_min_hz < cfg.f_max_hz && cfg.f_max_hz < sr / 2.0) {
        return Err(AcousticError::InvalidRange {
            f_min: cfg.f_min_hz,
            f_max: cfg.f_max_hz,
        });
    }
    let geo = PitchGeometry::new(cfg, buf.sample_rate_hz());
    let x = buf.samples();
    let span = geo.span();
    let n_frames = crate::audio_io::frame_count(x.len(), span, geo.hop);

    let fft_len = span.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(fft_len);
    let inv = planner.plan_fft_inverse(fft_len);
    let mut head = vec![Complex::new(0.0, 0.0); fft_len];
    let mut full = vec![Complex::new(0.0, 0.0); fft_len];
    let mut diff = vec![0.0; geo.tau_max + 1];
    let mut cmnd = vec![0.0; geo.tau_max + 1];

    let mut values = Vec::with_capacity(n_frames);
    for i in 0..n_frames {
        let seg = &x[i * geo.hop..i * geo.hop + span];
        difference_function(seg, geo, &*fwd, &*inv, &mut head, &mut full, &mut diff);
        cumulative_mean_normalize(&diff, &mut cmnd);
        let f0 = pick_period(&cmnd, geo, cfg.threshold)
            .map(|tau| sr / tau)
            .filter(|f| *f >= cfg.f_min_hz && *f <= cfg.f_max_hz)
            .unwrap_or(f64::NAN);
        values.push(f0);
    }
    Ok(FrameSeries {
        name: "f0_hz".into(),
        values,
        hop_seconds: geo.hop as f64 / sr,
        frame_seconds: span as f64 / sr,
    })
}

/// d(tau) = sum_{j<W} (x_j - x_{j+tau})^2, computed from energy prefix sums
/// and an FFT cross-correlation.
fn difference_function(
    seg: &[f64],
    geo: PitchGeometry,
    fwd: &dyn rustfft::Fft<f64>,
    inv: &dyn rustfft::Fft<f64>,
    head: &mut [Complex<f64>],
    full: &mut [Complex<f64>],
    diff: &mut [f64],
) {
    let w = geo.window;
    let n = head.len();
    for (k, (h, f)) in head.iter_mut().zip(full.iter_mut()).enumerate() {
        let v = seg.get(k).copied().unwrap_or(0.0);
        *f = Complex::new(v, 0.0);
        *h = Complex::new(if k < w { v } else { 0.0 }, 0.0);
    }
    fwd.process(head);
    fwd.process(full);
    for (h, f) in head.iter_mut().zip(full.iter()) {
        *h = h.conj() * f;
    }
    inv.process(head);

    let mut prefix = Vec::with_capacity(seg.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for v in seg {
        acc += v * v;
        prefix.push(acc);
    }
    let e0 = prefix[w];
    diff[0] = 0.0;
    for tau in 1..diff.len() {
        let etau = prefix[tau + w] - prefix[tau];
        let cross = head[tau].re / n as f64;
        diff[tau] = (e0 + etau - 2.0 * cross).max(0.0);
    }
}

fn cumulative_mean_normalize(diff: &[f64], out: &mut [f64]) {
    out[0] = 1.0;
    let mut running = 0.0;
    for tau in 1..diff.len() {
        running += diff[tau];
        out[tau] = if running > 0.0 {
            diff[tau] * tau as f64 / running
        } else {
            1.0
        };
    }
}

/// First dip below `threshold`, followed down to its local minimum, then
/// refined by parabolic interpolation. Returns the period in samples.
fn pick_period(cmnd: &[f64], geo: PitchGeometry, threshold: f64) -> Option<f64> {
    let mut tau = (geo.tau_min..=geo.tau_max).find(|&t| cmnd[t] < threshold)?;
    while tau < geo.tau_max && cmnd[tau + 1] < cmnd[tau] {
        tau += 1;
    }
    let mut refined = tau as f64;
    if tau > 1 && tau < geo.tau_max {
        let (a, b, c) = (cmnd[tau - 1], cmnd[tau], cmnd[tau + 1]);
        let denom = a - 2.0 * b + c;
        if denom.abs() > f64::EPSILON {
            let shift = 0.5 * (a - c) / denom;
            if shift.abs() <= 1.0 {
                refined += shift;
            }
        }
    }
    Some(refined)
}
