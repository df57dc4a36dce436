//! Synthetic signals shared by unit tests.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::audio_io::AudioBuffer;

pub fn sine(freq: f64, amp: f64, sr: u32, seconds: f64) -> AudioBuffer {
    let n = (seconds * sr as f64).round() as usize;
    let samples = (0..n)
        .map(|i| amp * (2.0 * PI * freq * i as f64 / sr as f64).sin())
        .collect();
    AudioBuffer::new(samples, sr, format!("sine{freq}")).unwrap()
}

pub fn white_noise(sr: u32, seconds: f64, amp: f64, seed: u64) -> AudioBuffer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = (seconds * sr as f64).round() as usize;
    let samples = (0..n).map(|_| rng.gen_range(-amp..amp)).collect();
    AudioBuffer::new(samples, sr, "noise").unwrap()
}

pub fn add(a: &AudioBuffer, b: &AudioBuffer) -> AudioBuffer {
    let samples = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(x, y)| (x + y).clamp(-1.0, 1.0))
        .collect();
    AudioBuffer::new(samples, a.sample_rate_hz(), a.source_id()).unwrap()
}

/// Harmonic source with slight vibrato, decaying harmonics and breath noise.
pub fn vowel(f0: f64, sr: u32, seconds: f64, seed: u64) -> AudioBuffer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = (seconds * sr as f64).round() as usize;
    let mut phase = 0.0;
    let samples = (0..n)
        .map(|i| {
            let t = i as f64 / sr as f64;
            let f = f0 * (1.0 + 0.01 * (2.0 * PI * 5.0 * t).sin());
            phase += 2.0 * PI * f / sr as f64;
            let harmonics: f64 = (1..=8).map(|h| (h as f64 * phase).sin() / h as f64).sum();
            0.25 * harmonics + 0.01 * rng.gen_range(-1.0..1.0)
        })
        .collect();
    AudioBuffer::new(samples, sr, "vowel").unwrap()
}
