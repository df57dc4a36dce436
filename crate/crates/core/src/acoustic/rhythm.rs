//! Tempo estimation from an onset-strength envelope.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::FrameSeries;
use crate::audio_io::WindowKind;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TempoConfig {
    /// Autocorrelation window in frames.
    pub win_length: usize,
    pub min_bpm: f64,
    pub max_bpm: f64,
}

impl Default for TempoConfig {
    fn default() -> Self {
        Self {
            win_length: 384,
            min_bpm: 30.0,
            max_bpm: 300.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TempoEstimate {
    pub tempo_bpm: f64,
    /// One row per onset frame; column `lag` holds the normalised local
    /// autocorrelation at that lag.
    pub tempogram: Vec<Vec<f64>>,
}

pub fn tempogram_tempo(onset: &FrameSeries, hop_seconds: f64) -> TempoEstimate {
    tempogram_tempo_with(onset, hop_seconds, &TempoConfig::default())
}

/// Windowed autocorrelation tempogram. The tempo is the lag maximising the
/// frame-averaged autocorrelation inside `[min_bpm, max_bpm]`; windows are
/// truncated to the envelope length for short inputs.
pub fn tempogram_tempo_with(
    onset: &FrameSeries,
    hop_seconds: f64,
    cfg: &TempoConfig,
) -> TempoEstimate {
    let env: Vec<f64> = onset
        .values
        .iter()
        .map(|v| if v.is_finite() { *v } else { 0.0 })
        .collect();
    let n = env.len();
    let win = cfg.win_length.min(n);
    if win < 2 || hop_seconds <= 0.0 {
        return TempoEstimate {
            tempo_bpm: f64::NAN,
            tempogram: Vec::new(),
        };
    }
    let window = WindowKind::Hann.coefficients(win);
    let fft_len = (2 * win).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(fft_len);
    let inv = planner.plan_fft_inverse(fft_len);
    let mut buf = vec![Complex::new(0.0, 0.0); fft_len];

    let half = win / 2;
    let mut tempogram = Vec::with_capacity(n);
    let mut aggregate = vec![0.0; win];
    for t in 0..n {
        for (k, slot) in buf.iter_mut().enumerate() {
            let v = if k < win {
                let idx = t as isize - half as isize + k as isize;
                if idx >= 0 && (idx as usize) < n {
                    env[idx as usize] * window[k]
                } else {
                    0.0
                }
            } else {
                0.0
            };
            *slot = Complex::new(v, 0.0);
        }
        fwd.process(&mut buf);
        for c in buf.iter_mut() {
            *c = Complex::new(c.norm_sqr(), 0.0);
        }
        inv.process(&mut buf);
        let zero_lag = buf[0].re;
        let row: Vec<f64> = if zero_lag > 1e-12 * fft_len as f64 {
            buf[..win].iter().map(|c| c.re / zero_lag).collect()
        } else {
            vec![0.0; win]
        };
        for (a, r) in aggregate.iter_mut().zip(&row) {
            *a += r / n as f64;
        }
        tempogram.push(row);
    }

    let lag_min = ((60.0 / (cfg.max_bpm * hop_seconds)).ceil() as usize).max(1);
    let lag_max = ((60.0 / (cfg.min_bpm * hop_seconds)).floor() as usize).min(win - 1);
    let best = (lag_min..=lag_max)
        .filter(|l| *l < win)
        .max_by(|&a, &b| aggregate[a].total_cmp(&aggregate[b]));
    let tempo_bpm = match best {
        Some(lag) if aggregate[lag] > 1e-9 => {
            let mut refined = lag as f64;
            if lag > lag_min && lag < lag_max {
                let (a, b, c) = (aggregate[lag - 1], aggregate[lag], aggregate[lag + 1]);
                let denom = a - 2.0 * b + c;
                if denom < 0.0 {
                    refined += (0.5 * (a - c) / denom).clamp(-0.5, 0.5);
                }
            }
            60.0 / (refined * hop_seconds)
        }
        _ => f64::NAN,
    };
    TempoEstimate {
        tempo_bpm,
        tempogram,
    }
}
