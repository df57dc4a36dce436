use super::FrameSeries;
use crate::audio_io::FrameMatrix;

#[derive(Debug, Clone)]
pub struct FrameScalars {
    pub zcr: FrameSeries,
    pub rms: FrameSeries,
}

/// Zero-crossing rate on the unwindowed samples and RMS on the windowed ones.
pub fn frame_scalars(frames: &FrameMatrix) -> FrameScalars {
    let hop_seconds = frames.hop_seconds();
    let frame_seconds = frames.frame_len() as f64 / frames.sample_rate_hz() as f64;
    let series = |name: &str, values: Vec<f64>| FrameSeries {
        name: name.into(),
        values,
        hop_seconds,
        frame_seconds,
    };
    let zcr = (0..frames.n_frames())
        .map(|i| zero_crossing_rate(frames.raw_frame(i)))
        .collect();
    let rms = frames.iter().map(rms).collect();
    FrameScalars {
        zcr: series("zcr", zcr),
        rms: series("rms", rms),
    }
}

/// Sign changes between adjacent samples over `len - 1`. Zero counts as positive.
pub fn zero_crossing_rate(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let changes = x
        .windows(2)
        .filter(|w| (w[0] >= 0.0) != (w[1] >= 0.0))
        .count();
    changes as f64 / (x.len() - 1) as f64
}

pub fn rms(x: &[f64]) -> f64 {
    if x.is_empty() {
        return f64::NAN;
    }
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio_io::{frame_signal, AudioBuffer, WindowKind};

    #[test]
    fn zcr_cases() {
        assert_eq!(zero_crossing_rate(&[0.3; 8]), 0.0);
        let alt: Vec<f64> = (0..8).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert_eq!(zero_crossing_rate(&alt), 1.0);
        assert_eq!(zero_crossing_rate(&[0.0; 8]), 0.0);
    }

    #[test]
    fn rms_by_hand() {
        assert!((rms(&[3.0, 4.0]) - 3.5355339059327378).abs() < 1e-15);
    }

    #[test]
    fn scalars_follow_frames() {
        let samples: Vec<f64> = (0..64).map(|i| if i % 2 == 0 { 0.5 } else { -0.5 }).collect();
        let buf = AudioBuffer::new(samples, 1000, "a").unwrap();
        let fm = frame_signal(&buf, 16, 8, WindowKind::Hann).unwrap();
        let fs = frame_scalars(&fm);
        assert_eq!(fs.zcr.values.len(), fm.n_frames());
        // window does not affect the zero-crossing count
        assert!(fs.zcr.values.iter().all(|z| *z == 1.0));
        assert!(fs.rms.values.iter().all(|r| *r > 0.0 && *r < 0.5));
    }
}
