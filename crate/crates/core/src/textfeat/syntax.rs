use std::collections::BTreeMap;

use super::Transcript;
use crate::functionals::FeatureVector;

/// Universal POS tags.
pub const UPOS_INVENTORY: [&str; 17] = [
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM", "PART", "PRON", "PROPN",
    "PUNCT", "SCONJ", "SYM", "VERB", "X",
];

/// Universal dependency relations, including common subtypes.
pub const DEPREL_INVENTORY: [&str; 46] = [
    "acl", "acl:relcl", "advcl", "advmod", "amod", "appos", "aux", "aux:pass", "case", "cc",
    "cc:preconj", "ccomp", "clf", "compound", "compound:prt", "conj", "cop", "csubj",
    "csubj:pass", "dep", "det", "det:predet", "discourse", "dislocated", "expl", "fixed", "flat",
    "goeswith", "iobj", "list", "mark", "nmod", "nmod:poss", "nsubj", "nsubj:pass", "nummod",
    "obj", "obl", "obl:tmod", "orphan", "parataxis", "punct", "reparandum", "root", "vocative",
    "xcomp",
];

pub const UNTAGGED: &str = "UNTAGGED";
pub const OTHER: &str = "OTHER";

#[derive(Debug, Clone, PartialEq)]
pub struct SyntaxCounts {
    pub pos_counts: BTreeMap<String, usize>,
    pub dep_counts: BTreeMap<String, usize>,
    pub total_tokens: usize,
}

fn pos_keys() -> impl Iterator<Item = &'static str> {
    UPOS_INVENTORY.iter().copied().chain([OTHER, UNTAGGED])
}

fn dep_keys() -> impl Iterator<Item = &'static str> {
    DEPREL_INVENTORY.iter().copied().chain([OTHER, UNTAGGED])
}

fn slug(tag: &str) -> String {
    tag.replace(':', "_")
}

/// Fixed feature names, in emission order.
pub fn syntax_feature_names() -> Vec<String> {
    let mut names = Vec::new();
    for (prefix, keys) in [("pos", pos_keys().collect::<Vec<_>>()), ("dep", dep_keys().collect())] {
        for k in keys {
            names.push(format!("{prefix}_{}_count", slug(k)));
            names.push(format!("{prefix}_{}_rate", slug(k)));
        }
    }
    names
}

fn bucket(tag: Option<&str>, inventory: &[&'static str]) -> &'static str {
    match tag {
        None => UNTAGGED,
        Some(t) => inventory
            .iter()
            .find(|k| k.eq_ignore_ascii_case(t))
            .copied()
            .unwrap_or(OTHER),
    }
}

/// Counts of UPOS tags and dependency relations over the fixed inventories.
/// Tags outside the inventory count as `OTHER`, missing tags as `UNTAGGED`.
pub fn syntax_counts(t: &Transcript) -> SyntaxCounts {
    let mut pos_counts: BTreeMap<String, usize> = pos_keys().map(|k| (k.to_string(), 0)).collect();
    let mut dep_counts: BTreeMap<String, usize> = dep_keys().map(|k| (k.to_string(), 0)).collect();
    for tok in t.tokens() {
        *pos_counts
            .get_mut(bucket(tok.pos.as_deref(), &UPOS_INVENTORY))
            .expect("fixed key") += 1;
        *dep_counts
            .get_mut(bucket(tok.deprel.as_deref(), &DEPREL_INVENTORY))
            .expect("fixed key") += 1;
    }
    SyntaxCounts {
        pos_counts,
        dep_counts,
        total_tokens: t.n_tokens(),
    }
}

impl SyntaxCounts {
    /// Count over total tokens; NaN for an empty transcript.
    pub fn pos_rate(&self, tag: &str) -> f64 {
        self.rate(self.pos_counts.get(tag).copied().unwrap_or(0))
    }

    pub fn dep_rate(&self, rel: &str) -> f64 {
        self.rate(self.dep_counts.get(rel).copied().unwrap_or(0))
    }

    fn rate(&self, count: usize) -> f64 {
        if self.total_tokens == 0 {
            f64::NAN
        } else {
            count as f64 / self.total_tokens as f64
        }
    }

    /// Counts and rates named as in [`syntax_feature_names`].
    pub fn to_features(&self) -> FeatureVector {
        let mut fv = FeatureVector::default();
        for k in pos_keys() {
            fv.push(format!("pos_{}_count", slug(k)), self.pos_counts[k] as f64);
            fv.push(format!("pos_{}_rate", slug(k)), self.pos_rate(k));
        }
        for k in dep_keys() {
            fv.push(format!("dep_{}_count", slug(k)), self.dep_counts[k] as f64);
            fv.push(format!("dep_{}_rate", slug(k)), self.dep_rate(k));
        }
        fv
    }
}
