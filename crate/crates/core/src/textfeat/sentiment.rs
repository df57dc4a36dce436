use std::collections::HashMap;

use super::{TextError, Transcript};

pub const SENTIMENT_NAME: &str = "sentiment_valence";

/// Mean valence of lexicon-matched lowercase tokens; NaN if none match.
pub fn sentiment(t: &Transcript, lexicon: &HashMap<String, f64>) -> Result<f64, TextError> {
    if lexicon.is_empty() {
        return Err(TextError::EmptyLexicon);
    }
    let (sum, n) = t
        .tokens()
        .filter_map(|tok| lexicon.get(&tok.lower))
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    Ok(if n == 0 { f64::NAN } else { sum / n as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textfeat::tokenize;

    fn lex() -> HashMap<String, f64> {
        [("good".to_string(), 1.0), ("bad".to_string(), -1.0)].into()
    }

    #[test]
    fn mean_valence() {
        let v = sentiment(&tokenize("good good bad"), &lex()).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(sentiment(&tokenize("Good bad"), &lex()).unwrap(), 0.0);
    }

    #[test]
    fn no_match_is_nan() {
        assert!(sentiment(&tokenize("the cat"), &lex()).unwrap().is_nan());
    }

    #[test]
    fn empty_lexicon_errors() {
        assert!(matches!(
            sentiment(&tokenize("good"), &HashMap::new()),
            Err(TextError::EmptyLexicon)
        ));
    }
}
