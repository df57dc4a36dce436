//! Synthetic recordings and transcripts for the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SR: u32 = 16_000;

pub fn write_wav(path: &Path, samples: &[f64], sr: u32) {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: sr,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut w = hound::WavWriter::create(path, spec).unwrap();
    for s in samples {
        w.write_sample((s.clamp(-1.0, 1.0) * 32767.0).round() as i16).unwrap();
    }
    w.finalize().unwrap();
}

pub fn sine(freq: f64, amp: f64, seconds: f64) -> Vec<f64> {
    let n = (seconds * SR as f64).round() as usize;
    (0..n).map(|i| amp * (2.0 * PI * freq * i as f64 / SR as f64).sin()).collect()
}

/// Voiced syllables at about 4 Hz over a gliding pitch contour, with
/// decaying harmonics and low-level breath noise.
pub fn speechlike(f0: f64, seconds: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = (seconds * SR as f64).round() as usize;
    let rate = rng.gen_range(3.0..5.0);
    let mut phase = 0.0;
    (0..n)
        .map(|i| {
            let t = i as f64 / SR as f64;
            let f = f0 * (1.0 + 0.06 * (2.0 * PI * 0.3 * t).sin() + 0.01 * (2.0 * PI * 5.5 * t).sin());
            phase += 2.0 * PI * f / SR as f64;
            let env = (2.0 * PI * rate * t).sin().max(0.0).powf(0.7);
            let voiced: f64 = (1..=8).map(|h| (h as f64 * phase).sin() / h as f64).sum();
            0.25 * env * voiced + 0.01 * rng.gen_range(-1.0..1.0)
        })
        .collect()
}

const WORDS: [&str; 24] = [
    "the", "cat", "dog", "sat", "on", "mat", "we", "walked", "home", "today", "it", "was", "very", "good", "bad",
    "happiness", "quickly", "two", "people", "talked", "about", "weather", "and", "xxx",
];

pub fn transcript_text(seed: u64, sentences: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..sentences {
        let len = rng.gen_range(3..9);
        let words: Vec<&str> = (0..len).map(|_| WORDS[rng.gen_range(0..WORDS.len())]).collect();
        out.push(format!("{}.", words.join(" ")));
    }
    out.join(" ")
}

const UPOS: [&str; 6] = ["DET", "NOUN", "VERB", "ADP", "ADJ", "PRON"];
const DEPREL: [&str; 6] = ["det", "nsubj", "root", "case", "amod", "obj"];

pub fn transcript_conllu(seed: u64, sentences: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    for s in 0..sentences {
        out.push_str(&format!("# sent_id = {s}\n"));
        let len = rng.gen_range(3..8);
        for i in 1..=len {
            let w = WORDS[rng.gen_range(0..WORDS.len() - 1)];
            let k = rng.gen_range(0..UPOS.len());
            let head = if DEPREL[k] == "root" { 0 } else { 1 };
            out.push_str(&format!("{i}\t{w}\t{w}\t{}\t_\t_\t{head}\t{}\t_\t_\n", UPOS[k], DEPREL[k]));
        }
        out.push('\n');
    }
    out
}

/// Ten recordings of `seconds` each with alternating `.txt` and `.conllu`
/// transcripts.
pub fn corpus(dir: &Path, seconds: f64) -> Vec<PathBuf> {
    (0..10)
        .map(|i| {
            let id = format!("rec{i:02}");
            let wav = dir.join(format!("{id}.wav"));
            write_wav(&wav, &speechlike(100.0 + 12.0 * i as f64, seconds, i), SR);
            if i % 2 == 0 {
                std::fs::write(dir.join(format!("{id}.txt")), transcript_text(100 + i, 6)).unwrap();
            } else {
                std::fs::write(dir.join(format!("{id}.conllu")), transcript_conllu(100 + i, 6)).unwrap();
            }
            wav
        })
        .collect()
}

pub fn voicemark(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_voicemark"))
        .args(args)
        .env_remove("VOICEMARK_CONFIG")
        .env_remove("VOICEMARK_JOBS")
        .env_remove("VOICEMARK_SEED")
        .output()
        .expect("binary runs")
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}
