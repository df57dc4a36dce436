//! Cycle-level voice quality: local jitter, local shimmer and an
//! autocorrelation-based harmonics-to-noise ratio.

use super::FrameSeries;
use crate::audio_io::AudioBuffer;

/// Correlation is clamped to this interval before conversion to dB, which
/// bounds HNR to roughly [-60, 90] dB.
const HNR_R_MIN: f64 = 1e-6;
const HNR_R_MAX: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JitterShimmerReport {
    pub jitter_local: f64,
    pub shimmer_local: f64,
    pub hnr_db: f64,
    pub n_cycles: usize,
    pub f0_mean_hz: f64,
}

/// Full cycle-level measurements behind a [`JitterShimmerReport`].
#[derive(Debug, Clone)]
pub struct VoiceQuality {
    pub report: JitterShimmerReport,
    /// Glottal periods in seconds, in signal order.
    pub periods: Vec<f64>,
    /// Peak amplitude of every detected cycle.
    pub amplitudes: Vec<f64>,
    /// |T_i - T_{i-1}| / mean(T) for consecutive periods within a voiced run.
    pub jitter_series: FrameSeries,
    /// |A_i - A_{i-1}| / mean(A) for consecutive peaks within a voiced run.
    pub shimmer_series: FrameSeries,
    /// Per-frame HNR in dB aligned with the F0 track (`NaN` when unvoiced).
    pub hnr_series: FrameSeries,
}

pub fn jitter_shimmer_hnr(buf: &AudioBuffer, f0: &FrameSeries) -> JitterShimmerReport {
    analyze_voice_quality(buf, f0).report
}

/// Locates glottal cycles by peak picking inside voiced runs, guided by the
/// local F0 estimate, and summarises their period and amplitude perturbation.
pub fn analyze_voice_quality(buf: &AudioBuffer, f0: &FrameSeries) -> VoiceQuality {
    let x = buf.samples();
    let sr = buf.sample_rate_hz() as f64;
    let hop = (f0.hop_seconds * sr).round().max(1.0) as usize;
    let span = (f0.frame_seconds * sr).round().max(1.0) as usize;

    let mut periods = Vec::new();
    let mut amplitudes = Vec::new();
    let mut period_deltas = Vec::new();
    let mut amp_deltas = Vec::new();

    for (first, last) in voiced_runs(&f0.values) {
        let start = first * hop;
        let end = (last * hop + span).min(x.len());
        let guide = |pos: f64| -> f64 {
            let idx = ((pos - span as f64 / 2.0) / hop as f64).round();
            let idx = (idx.max(first as f64) as usize).min(last);
            sr / f0.values[idx]
        };
        let peaks = pick_cycle_peaks(x, start, end, guide);
        for w in peaks.windows(2) {
            periods.push((w[1].0 - w[0].0) / sr);
        }
        for w in peaks.windows(3) {
            let t1 = (w[1].0 - w[0].0) / sr;
            let t2 = (w[2].0 - w[1].0) / sr;
            period_deltas.push((t2 - t1).abs());
        }
        for w in peaks.windows(2) {
            amp_deltas.push((w[1].1 - w[0].1).abs());
        }
        amplitudes.extend(peaks.iter().map(|p| p.1));
    }

    let n_cycles = periods.len();
    let (jitter_local, shimmer_local, jitter_vals, shimmer_vals) = if n_cycles < 2 {
        (f64::NAN, f64::NAN, Vec::new(), Vec::new())
    } else {
        let mean_t = mean(&periods);
        let mean_a = mean(&amplitudes);
        let jv: Vec<f64> = period_deltas.iter().map(|d| d / mean_t).collect();
        let sv: Vec<f64> = amp_deltas.iter().map(|d| d / mean_a).collect();
        (mean(&jv), mean(&sv), jv, sv)
    };

    let hnr_values: Vec<f64> = f0
        .values
        .iter()
        .enumerate()
        .map(|(i, &f)| {
            if f.is_nan() {
                return f64::NAN;
            }
            let start = i * hop;
            let end = (start + span).min(x.len());
            frame_hnr_db(&x[start..end], sr / f)
        })
        .collect();
    let voiced_hnr: Vec<f64> = hnr_values.iter().copied().filter(|v| !v.is_nan()).collect();
    let voiced_f0: Vec<f64> = f0.values.iter().copied().filter(|v| !v.is_nan()).collect();

    let report = JitterShimmerReport {
        jitter_local,
        shimmer_local,
        hnr_db: mean(&voiced_hnr),
        n_cycles,
        f0_mean_hz: mean(&voiced_f0),
    };
    let cycle_series = |name: &str, values: Vec<f64>| FrameSeries {
        name: name.into(),
        values,
        hop_seconds: 0.0,
        frame_seconds: 0.0,
    };
    VoiceQuality {
        report,
        periods,
        amplitudes,
        jitter_series: cycle_series("jitter", jitter_vals),
        shimmer_series: cycle_series("shimmer", shimmer_vals),
        hnr_series: FrameSeries {
            name: "hnr_db".into(),
            values: hnr_values,
            hop_seconds: f0.hop_seconds,
            frame_seconds: f0.frame_seconds,
        },
    }
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        f64::NAN
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// Inclusive index ranges of consecutive non-NaN values.
fn voiced_runs(values: &[f64]) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut open: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        match (v.is_nan(), open) {
            (false, None) => open = Some(i),
            (true, Some(s)) => {
                runs.push((s, i - 1));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        runs.push((s, values.len() - 1));
    }
    runs
}

/// Positive peaks one period apart within `[start, end)`. Each peak is
/// `(position_in_samples, amplitude)` refined by parabolic interpolation.
fn pick_cycle_peaks(
    x: &[f64],
    start: usize,
    end: usize,
    period_at: impl Fn(f64) -> f64,
) -> Vec<(f64, f64)> {
    let mut peaks = Vec::new();
    if end <= start + 2 {
        return peaks;
    }
    let first_period = period_at(start as f64);
    let first_end = (start + first_period.ceil() as usize).min(end);
    let Some(mut idx) = argmax(x, start, first_end) else {
        return peaks;
    };
    loop {
        let peak = refine_peak(x, idx);
        if peak.1 <= 0.0 {
            break;
        }
        peaks.push(peak);
        let period = period_at(peak.0);
        let lo = (peak.0 + 0.75 * period).ceil() as usize;
        let hi = (peak.0 + 1.25 * period).floor() as usize + 1;
        if hi > end || lo >= hi {
            break;
        }
        match argmax(x, lo, hi) {
            Some(next) => idx = next,
            None => break,
        }
    }
    peaks
}

fn argmax(x: &[f64], lo: usize, hi: usize) -> Option<usize> {
    (lo..hi.min(x.len())).max_by(|&a, &b| x[a].total_cmp(&x[b]))
}

fn refine_peak(x: &[f64], i: usize) -> (f64, f64) {
    if i == 0 || i + 1 >= x.len() {
        return (i as f64, x[i]);
    }
    let (a, b, c) = (x[i - 1], x[i], x[i + 1]);
    let denom = a - 2.0 * b + c;
    if denom >= 0.0 {
        return (i as f64, b);
    }
    let shift = (0.5 * (a - c) / denom).clamp(-0.5, 0.5);
    (i as f64 + shift, b - 0.25 * (a - c) * shift)
}

/// 10·log10(r / (1 - r)) where r is the normalized autocorrelation peak near
/// the lag `period` (in samples).
fn frame_hnr_db(frame: &[f64], period: f64) -> f64 {
    let lag_lo = (period.floor() as usize).saturating_sub(1).max(1);
    let lag_hi = period.ceil() as usize + 1;
    if lag_hi + 1 >= frame.len() {
        return f64::NAN;
    }
    let r: Vec<f64> = (lag_lo..=lag_hi + 1)
        .map(|lag| normalized_autocorr(frame, lag))
        .collect();
    // best interior lag, then parabolic refinement of the peak value
    let (best, &rb) = r[1..r.len() - 1]
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, v)| (i + 1, v))
        .unwrap();
    let (ra, rc) = (r[best - 1], r[best + 1]);
    let denom = ra - 2.0 * rb + rc;
    let peak = if denom < 0.0 {
        let shift = (0.5 * (ra - rc) / denom).clamp(-0.5, 0.5);
        rb - 0.25 * (ra - rc) * shift
    } else {
        rb
    };
    if !peak.is_finite() {
        return f64::NAN;
    }
    let r = peak.clamp(HNR_R_MIN, HNR_R_MAX);
    10.0 * (r / (1.0 - r)).log10()
}

fn normalized_autocorr(x: &[f64], lag: usize) -> f64 {
    let n = x.len() - lag;
    let (mut xy, mut xx, mut yy) = (0.0, 0.0, 0.0);
    for j in 0..n {
        let (a, b) = (x[j], x[j + lag]);
        xy += a * b;
        xx += a * a;
        yy += b * b;
    }
    if xx <= 0.0 || yy <= 0.0 {
        return f64::NAN;
    }
    xy / (xx * yy).sqrt()
}
