//! Loaders for word lists, suffix lists and valence lexicons.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use super::TextError;

pub const DEFAULT_SUFFIXES: [&str; 8] = ["ness", "ment", "tion", "ity", "able", "ful", "less", "ly"];

fn entries(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// One word per line, lowercased. Blank lines and `#` comments are ignored.
pub fn load_word_list(path: &Path) -> Result<HashSet<String>, TextError> {
    let text = std::fs::read_to_string(path)?;
    Ok(entries(&text).map(|(_, w)| w.to_lowercase()).collect())
}

/// One suffix per line, lowercased, in file order without duplicates.
pub fn load_suffix_list(path: &Path) -> Result<Vec<String>, TextError> {
    let text = std::fs::read_to_string(path)?;
    let mut out: Vec<String> = Vec::new();
    for (_, s) in entries(&text) {
        let s = s.trim_start_matches('-').to_lowercase();
        if !s.is_empty() && !out.contains(&s) {
            out.push(s);
        }
    }
    Ok(out)
}

pub fn load_valence_lexicon(path: &Path) -> Result<HashMap<String, f64>, TextError> {
    parse_valence_lexicon(&std::fs::read_to_string(path)?)
}

/// `word,valence` rows. A first row whose valence does not parse is taken as
/// a header. Later duplicates replace earlier ones.
pub fn parse_valence_lexicon(text: &str) -> Result<HashMap<String, f64>, TextError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut out = HashMap::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| TextError::MalformedResource {
            line: i + 1,
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        if rec.len() != 2 {
            return Err(TextError::MalformedResource {
                line,
                message: format!("expected word,valence, found {} fields", rec.len()),
            });
        }
        match rec[1].parse::<f64>() {
            Ok(v) if v.is_finite() => {
                out.insert(rec[0].to_lowercase(), v);
            }
            _ if i == 0 => {}
            _ => {
                return Err(TextError::MalformedResource {
                    line,
                    message: format!("bad valence {:?}", &rec[1]),
                })
            }
        }
    }
    Ok(out)
}
