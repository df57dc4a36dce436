//! Semantic coherence between transcript phrases from word embeddings.

mod embedding;

use thiserror::Error;

pub use embedding::{load_embeddings, parse_embeddings, EmbeddingTable};

use crate::functionals::{compute_stats, FeatureVector, Stat};
use crate::textfeat::{Token, Transcript};

#[derive(Debug, Error)]
pub enum CoherenceError {
    #[error("embedding line {line}: expected {expected} components for '{word}', found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
        word: String,
    },
    #[error("embedding file has no vectors")]
    EmptyFile,
    #[error("embedding line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub const COHERENCE_STATS: [Stat; 5] = [
    Stat::Mean,
    Stat::Stddev,
    Stat::Min,
    Stat::Max,
    Stat::Percentile(10.0),
];

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceConfig {
    pub orders: Vec<usize>,
    /// Phrase distance of order 0. Order `q` compares phrases `i` and
    /// `i + q + base_distance`.
    pub base_distance: usize,
}

impl Default for CoherenceConfig {
    fn default() -> Self {
        Self {
            orders: vec![0, 1, 2, 3],
            base_distance: 1,
        }
    }
}

/// Statistics of one order, raw and baseline-subtracted, in the order of
/// [`COHERENCE_STATS`].
#[derive(Debug, Clone, PartialEq)]
pub struct OrderStats {
    pub order: usize,
    pub raw: [f64; 5],
    pub normalized: [f64; 5],
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceFeatures {
    pub orders: Vec<OrderStats>,
    pub max_phrase_length: usize,
    pub determiner_rate: f64,
    /// Phrases with no in-vocabulary token.
    pub skipped_phrases: usize,
    /// Mean cosine over all defined phrase pairs.
    pub baseline: f64,
}

/// Mean embedding of the in-vocabulary lowercase tokens; `None` when no token
/// is in the vocabulary.
pub fn phrase_vector(sentence: &[Token], emb: &EmbeddingTable) -> Option<Vec<f64>> {
    let mut sum = vec![0.0; emb.dim()];
    let mut n = 0usize;
    for v in sentence.iter().filter_map(|t| emb.get(&t.lower)) {
        sum.iter_mut().zip(v).for_each(|(s, x)| *s += x);
        n += 1;
    }
    (n > 0).then(|| sum.into_iter().map(|s| s / n as f64).collect())
}

/// Cosine similarity clamped to [-1, 1]; NaN if either vector has zero norm.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum();
    let nb: f64 = b.iter().map(|x| x * x).sum();
    if na == 0.0 || nb == 0.0 {
        return f64::NAN;
    }
    (dot / (na * nb).sqrt()).clamp(-1.0, 1.0)
}

fn defined_vectors(t: &Transcript, emb: &EmbeddingTable) -> Vec<Vec<f64>> {
    t.sentences()
        .iter()
        .filter_map(|s| phrase_vector(s, emb))
        .collect()
}

fn series_at_distance(vectors: &[Vec<f64>], distance: usize) -> Vec<f64> {
    if vectors.len() <= distance {
        return Vec::new();
    }
    (0..vectors.len() - distance)
        .map(|i| cosine(&vectors[i], &vectors[i + distance]))
        .filter(|c| !c.is_nan())
        .collect()
}

/// Cosines between phrase vectors `q + 1` apart, skipping phrases with no
/// vector. Empty when fewer than `q + 2` phrases have vectors.
pub fn coherence_series(t: &Transcript, emb: &EmbeddingTable, q: usize) -> Vec<f64> {
    series_at_distance(&defined_vectors(t, emb), q + 1)
}

fn all_pairs_mean(vectors: &[Vec<f64>]) -> f64 {
    let (mut sum, mut n) = (0.0, 0usize);
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            let c = cosine(&vectors[i], &vectors[j]);
            if !c.is_nan() {
                sum += c;
                n += 1;
            }
        }
    }
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

fn stats5(values: &[f64]) -> [f64; 5] {
    let v = compute_stats(values, &COHERENCE_STATS);
    [v[0], v[1], v[2], v[3], v[4]]
}

pub fn coherence_features(t: &Transcript, emb: &EmbeddingTable) -> CoherenceFeatures {
    coherence_features_with(t, emb, &CoherenceConfig::default())
}

/// Per-order coherence statistics plus phrase length and determiner use.
/// Normalized statistics subtract the document's all-pairs mean cosine.
/// The determiner rate is NaN when no token carries a POS tag.
pub fn coherence_features_with(
    t: &Transcript,
    emb: &EmbeddingTable,
    cfg: &CoherenceConfig,
) -> CoherenceFeatures {
    let vectors = defined_vectors(t, emb);
    let baseline = all_pairs_mean(&vectors);
    let orders = cfg
        .orders
        .iter()
        .map(|&q| {
            let series = series_at_distance(&vectors, q + cfg.base_distance);
            let shifted: Vec<f64> = series.iter().map(|c| c - baseline).collect();
            OrderStats {
                order: q,
                raw: stats5(&series),
                normalized: stats5(&shifted),
            }
        })
        .collect();
    let tagged = t.tokens().filter(|tok| tok.pos.is_some()).count();
    let determiners = t
        .tokens()
        .filter(|tok| tok.pos.as_deref() == Some("DET"))
        .count();
    CoherenceFeatures {
        orders,
        max_phrase_length: t.sentences().iter().map(Vec::len).max().unwrap_or(0),
        determiner_rate: if tagged == 0 {
            f64::NAN
        } else {
            determiners as f64 / t.n_tokens() as f64
        },
        skipped_phrases: t.sentences().len() - vectors.len(),
        baseline,
    }
}

/// Feature names for the given orders, in emission order.
pub fn coherence_feature_names(orders: &[usize]) -> Vec<String> {
    let mut names = Vec::new();
    for q in orders {
        for s in COHERENCE_STATS {
            names.push(format!("coh_o{q}_{s}"));
        }
        for s in COHERENCE_STATS {
            names.push(format!("coh_o{q}_norm_{s}"));
        }
    }
    names.push("coh_max_phrase_length".into());
    names.push("coh_determiner_rate".into());
    names
}

impl CoherenceFeatures {
    pub fn to_features(&self) -> FeatureVector {
        let mut fv = FeatureVector::default();
        for o in &self.orders {
            for (s, v) in COHERENCE_STATS.iter().zip(o.raw) {
                fv.push(format!("coh_o{}_{s}", o.order), v);
            }
            for (s, v) in COHERENCE_STATS.iter().zip(o.normalized) {
                fv.push(format!("coh_o{}_norm_{s}", o.order), v);
            }
        }
        fv.push("coh_max_phrase_length", self.max_phrase_length as f64);
        fv.push("coh_determiner_rate", self.determiner_rate);
        fv
    }
}
