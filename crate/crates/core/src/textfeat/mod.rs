//! Transcript features: lexical complexity, part-of-speech and dependency
//! counts, and lexicon sentiment.

mod complexity;
mod conllu;
mod resources;
mod sentiment;
mod syntax;
mod tokenize;

use thiserror::Error;

pub use complexity::{complexity, ComplexityFeatures, ComplexityOptions, COMPLEXITY_NAMES, NUMBER_WORDS};
pub use conllu::{load_conllu, parse_conllu};
pub use resources::{
    load_suffix_list, load_valence_lexicon, load_word_list, parse_valence_lexicon, DEFAULT_SUFFIXES,
};
pub use sentiment::{sentiment, SENTIMENT_NAME};
pub use syntax::{syntax_counts, syntax_feature_names, SyntaxCounts, DEPREL_INVENTORY, UPOS_INVENTORY};
pub use tokenize::{tokenize, tokenize_with, DEFAULT_UNINTELLIGIBLE_MARKERS};

#[derive(Debug, Error)]
pub enum TextError {
    #[error("malformed CoNLL-U at line {line}: {message}")]
    MalformedConllu { line: usize, message: String },
    #[error("sentiment lexicon is empty")]
    EmptyLexicon,
    #[error("malformed resource file at line {line}: {message}")]
    MalformedResource { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub lower: String,
    pub pos: Option<String>,
    pub deprel: Option<String>,
    pub is_unintelligible: bool,
}

impl Token {
    pub fn new(surface: impl Into<String>) -> Self {
        let surface = surface.into();
        Self {
            lower: surface.to_lowercase(),
            surface,
            pos: None,
            deprel: None,
            is_unintelligible: false,
        }
    }

    pub fn with_pos(mut self, pos: impl Into<String>) -> Self {
        self.pos = Some(pos.into());
        self
    }

    pub fn with_deprel(mut self, deprel: impl Into<String>) -> Self {
        self.deprel = Some(deprel.into());
        self
    }
}

/// Sentences of tokens. Every stored sentence is non-empty.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Transcript {
    sentences: Vec<Vec<Token>>,
}

impl Transcript {
    /// Builds a transcript, dropping empty sentences.
    pub fn new(sentences: Vec<Vec<Token>>) -> Self {
        Self {
            sentences: sentences.into_iter().filter(|s| !s.is_empty()).collect(),
        }
    }

    pub fn sentences(&self) -> &[Vec<Token>] {
        &self.sentences
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> + '_ {
        self.sentences.iter().flatten()
    }

    pub fn n_tokens(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// The transcript followed by a copy of itself.
    pub fn doubled(&self) -> Self {
        let mut sentences = self.sentences.clone();
        sentences.extend(self.sentences.iter().cloned());
        Self { sentences }
    }
}
