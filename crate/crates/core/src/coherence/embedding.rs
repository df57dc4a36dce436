use std::collections::HashMap;
use std::path::Path;

use super::CoherenceError;

const BUNDLED: &str = include_str!("../../resources/tiny_embedding.txt");

/// Word vectors of one fixed dimension. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dim: usize, vectors: HashMap<String, Vec<f64>>) -> Result<Self, CoherenceError> {
        if dim == 0 || vectors.is_empty() {
            return Err(CoherenceError::EmptyFile);
        }
        if let Some((word, v)) = vectors.iter().find(|(_, v)| v.len() != dim) {
            return Err(CoherenceError::DimensionMismatch {
                line: 0,
                expected: dim,
                found: v.len(),
                word: word.clone(),
            });
        }
        Ok(Self { dim, vectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    /// A 36-word, 8-dimensional table for tests and demos.
    pub fn bundled_test_embedding() -> Self {
        parse_embeddings(BUNDLED).expect("bundled embedding is well formed")
    }

    /// Every vector multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            vectors: self
                .vectors
                .iter()
                .map(|(w, v)| (w.clone(), v.iter().map(|x| x * factor).collect()))
                .collect(),
        }
    }
}

pub fn load_embeddings(path: &Path) -> Result<EmbeddingTable, CoherenceError> {
    parse_embeddings(&std::fs::read_to_string(path)?)
}

/// Text vectors: an optional `count dim` header, then `word v1 .. vdim` per
/// line. Without a header the dimension comes from the first row. Words are
/// lowercased and a repeated word keeps its last vector.
pub fn parse_embeddings(text: &str) -> Result<EmbeddingTable, CoherenceError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .peekable();
    let mut dim = None;
    if let Some((_, first)) = lines.peek() {
        let parts: Vec<&str> = first.split_whitespace().collect();
        if parts.len() == 2 && parts.iter().all(|p| p.parse::<usize>().is_ok()) {
            let d: usize = parts[1].parse().unwrap_or(0);
            if d == 0 {
                return Err(CoherenceError::Parse {
                    line: 1,
                    message: "header dimension must be positive".into(),
                });
            }
            dim = Some(d);
            lines.next();
        }
    }
    let mut vectors = HashMap::new();
    for (line, l) in lines {
        let mut parts = l.split_whitespace();
        let word = parts.next().unwrap_or_default().to_lowercase();
        let v = parts
            .map(|p| p.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CoherenceError::Parse {
                line,
                message: e.to_string(),
            })?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(CoherenceError::Parse {
                line,
                message: "non-finite component".into(),
            });
        }
        let expected = *dim.get_or_insert(v.len());
        if v.len() != expected || expected == 0 {
            return Err(CoherenceError::DimensionMismatch {
                line,
                expected,
                found: v.len(),
                word,
            });
        }
        vectors.insert(word, v);
    }
    match dim {
        Some(d) if !vectors.is_empty() => Ok(EmbeddingTable { dim: d, vectors }),
        _ => Err(CoherenceError::EmptyFile),
    }
}
