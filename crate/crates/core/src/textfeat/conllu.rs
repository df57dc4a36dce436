use std::path::Path;

use super::{TextError, Token, Transcript};

pub fn load_conllu(path: &Path) -> Result<Transcript, TextError> {
    parse_conllu(&std::fs::read_to_string(path)?)
}

fn field(s: &str) -> Option<String> {
    (s != "_" && !s.is_empty()).then(|| s.to_string())
}

/// Parses CoNLL-U text. UPOS becomes `pos` and DEPREL becomes `deprel`.
/// Multiword ranges (`1-2`) and empty nodes (`1.1`) are skipped.
pub fn parse_conllu(text: &str) -> Result<Transcript, TextError> {
    let mut sentences = Vec::new();
    let mut current = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            if !current.is_empty() {
                sentences.push(std::mem::take(&mut current));
            }
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(TextError::MalformedConllu {
                line: i + 1,
                message: format!("expected 10 tab-separated columns, found {}", cols.len()),
            });
        }
        let id = cols[0];
        if id.contains('-') || id.contains('.') {
            continue;
        }
        if id.parse::<usize>().is_err() {
            return Err(TextError::MalformedConllu {
                line: i + 1,
                message: format!("bad token id {id:?}"),
            });
        }
        let form = cols[1];
        if form.is_empty() {
            return Err(TextError::MalformedConllu {
                line: i + 1,
                message: "empty FORM".into(),
            });
        }
        let mut tok = Token::new(form);
        tok.pos = field(cols[3]);
        tok.deprel = field(cols[7]);
        current.push(tok);
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    Ok(Transcript::new(sentences))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_token() {
        let t = parse_conllu("1\tcat\tcat\tNOUN\tNN\t_\t0\troot\t_\t_\n").unwrap();
        assert_eq!(t.n_tokens(), 1);
        let tok = t.tokens().next().unwrap();
        assert_eq!(tok.pos.as_deref(), Some("NOUN"));
        assert_eq!(tok.deprel.as_deref(), Some("root"));
    }

    #[test]
    fn two_blocks() {
        let text = "# sent_id = 1\n1\tHi\thi\tINTJ\t_\t_\t0\troot\t_\t_\n\n\
                    1\tGo\tgo\tVERB\t_\t_\t0\troot\t_\t_\n2\tnow\tnow\tADV\t_\t_\t1\tadvmod\t_\t_\n";
        let t = parse_conllu(text).unwrap();
        assert_eq!(t.sentences().len(), 2);
        assert_eq!(t.sentences()[1].len(), 2);
    }

    #[test]
    fn short_line_is_malformed() {
        let err = parse_conllu("1\tcat\tcat\n").unwrap_err();
        assert!(matches!(err, TextError::MalformedConllu { line: 1, .. }));
    }

    #[test]
    fn ranges_and_empty_nodes_skipped() {
        let text = "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n\
                    1\tdo\tdo\tAUX\t_\t_\t0\troot\t_\t_\n\
                    2\tn't\tnot\tPART\t_\t_\t1\tadvmod\t_\t_\n\
                    2.1\tx\tx\tX\t_\t_\t_\t_\t_\t_\n";
        let t = parse_conllu(text).unwrap();
        assert_eq!(t.n_tokens(), 2);
    }

    #[test]
    fn underscore_tags_are_absent() {
        let t = parse_conllu("1\tcat\tcat\t_\t_\t_\t0\t_\t_\t_\n").unwrap();
        let tok = t.tokens().next().unwrap();
        assert!(tok.pos.is_none() && tok.deprel.is_none());
    }
}
