use std::collections::HashSet;

use super::{Token, Transcript};

pub const DEFAULT_UNINTELLIGIBLE_MARKERS: [&str; 3] = ["xxx", "[unintelligible]", "[inaudible]"];

pub fn tokenize(text: &str) -> Transcript {
    let markers: HashSet<String> = DEFAULT_UNINTELLIGIBLE_MARKERS
        .iter()
        .map(|s| s.to_string())
        .collect();
    tokenize_with(text, &markers)
}

/// Splits sentences at `.`, `!` or `?` followed by whitespace or end of text,
/// then tokens at whitespace. Leading and trailing non-alphanumeric
/// characters are stripped from each token unless the token (lowercased) is
/// an unintelligible marker, in which case it is kept verbatim and flagged.
pub fn tokenize_with(text: &str, markers: &HashSet<String>) -> Transcript {
    let mut sentences = Vec::new();
    let mut current = Vec::new();
    for raw in text.split_whitespace() {
        let lower = raw.to_lowercase();
        let ends_sentence = raw.ends_with(['.', '!', '?']);
        if markers.contains(&lower) {
            current.push(Token {
                surface: raw.to_string(),
                lower,
                pos: None,
                deprel: None,
                is_unintelligible: true,
            });
        } else {
            let stripped = raw.trim_matches(|c: char| !c.is_alphanumeric());
            if !stripped.is_empty() {
                let mut tok = Token::new(stripped);
                tok.is_unintelligible = markers.contains(&tok.lower);
                current.push(tok);
            }
        }
        if ends_sentence && !current.is_empty() {
            sentences.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    Transcript::new(sentences)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sentences() {
        let t = tokenize("The cat. The cat.");
        assert_eq!(t.sentences().len(), 2);
        assert!(t.sentences().iter().all(|s| s.len() == 2));
        assert_eq!(t.sentences()[0][0].surface, "The");
        assert_eq!(t.sentences()[0][0].lower, "the");
        assert_eq!(t.sentences()[0][1].surface, "cat");
    }

    #[test]
    fn marker_is_flagged() {
        let t = tokenize("uh xxx okay");
        let flagged: Vec<_> = t.tokens().filter(|t| t.is_unintelligible).collect();
        assert_eq!(flagged.len(), 1);
        assert_eq!(flagged[0].surface, "xxx");
        let t = tokenize("it was [inaudible] today");
        assert!(t.tokens().any(|t| t.is_unintelligible && t.surface == "[inaudible]"));
    }

    #[test]
    fn empty_text() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("  ... !! ").is_empty());
    }

    #[test]
    fn decimals_do_not_split_sentences() {
        let t = tokenize("It cost 3.5 dollars! Really? yes");
        assert_eq!(t.sentences().len(), 3);
        assert_eq!(t.sentences()[0][2].surface, "3.5");
    }

    #[test]
    fn inner_punctuation_kept() {
        let t = tokenize("\"don't\", she said.");
        assert_eq!(t.sentences()[0][0].surface, "don't");
    }
}
