use std::collections::{BTreeMap, HashSet};

use super::{Token, Transcript};

pub const NUMBER_WORDS: [&str; 32] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
    "nineteen", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
    "hundred", "thousand", "million", "billion",
];

pub const COMPLEXITY_NAMES: [&str; 7] = [
    "unintelligible_word_ratio",
    "standardized_word_entropy",
    "suffix_ratio",
    "number_ratio",
    "brunet_index",
    "honore_statistic",
    "type_token_ratio",
];

const BRUNET_EXPONENT: f64 = -0.165;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityFeatures {
    pub unintelligible_word_ratio: f64,
    pub standardized_word_entropy: f64,
    pub suffix_ratio: f64,
    pub number_ratio: f64,
    pub brunet_index: f64,
    pub honore_statistic: f64,
    pub type_token_ratio: f64,
}

impl ComplexityFeatures {
    pub fn nan() -> Self {
        Self {
            unintelligible_word_ratio: f64::NAN,
            standardized_word_entropy: f64::NAN,
            suffix_ratio: f64::NAN,
            number_ratio: f64::NAN,
            brunet_index: f64::NAN,
            honore_statistic: f64::NAN,
            type_token_ratio: f64::NAN,
        }
    }

    /// Values in the order of [`COMPLEXITY_NAMES`].
    pub fn values(&self) -> [f64; 7] {
        [
            self.unintelligible_word_ratio,
            self.standardized_word_entropy,
            self.suffix_ratio,
            self.number_ratio,
            self.brunet_index,
            self.honore_statistic,
            self.type_token_ratio,
        ]
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ComplexityOptions<'a> {
    /// Known words; tokens outside it count as unintelligible.
    pub lexicon: Option<&'a HashSet<String>>,
    pub suffixes: &'a [String],
}

/// A token like `12`, `3.5` or `1,000`. At least one ASCII digit is required
/// so that `nan` or `inf` do not count.
fn is_numeric(s: &str) -> bool {
    s.bytes().any(|b| b.is_ascii_digit()) && s.replace(',', "").parse::<f64>().is_ok()
}

fn has_suffix(word: &str, suffixes: &[String]) -> bool {
    suffixes
        .iter()
        .any(|s| word.len() > s.len() && word.ends_with(s.as_str()))
}

fn is_out_of_lexicon(tok: &Token, lexicon: &HashSet<String>) -> bool {
    !tok.is_unintelligible && !is_numeric(&tok.lower) && !lexicon.contains(&tok.lower)
}

/// The seven lexical complexity metrics over lowercased tokens. All fields
/// are NaN for an empty transcript. Entropy is NaN with a single word type
/// and Honoré's statistic is NaN when every type occurs once.
pub fn complexity(t: &Transcript, opts: ComplexityOptions<'_>) -> ComplexityFeatures {
    let n_tokens = t.n_tokens();
    if n_tokens == 0 {
        return ComplexityFeatures::nan();
    }
    let n = n_tokens as f64;
    // Ordered so the entropy sum is reproducible across runs.
    let mut freq: BTreeMap<&str, usize> = BTreeMap::new();
    let (mut unintelligible, mut suffixed, mut numbers) = (0usize, 0usize, 0usize);
    for tok in t.tokens() {
        *freq.entry(tok.lower.as_str()).or_default() += 1;
        if tok.is_unintelligible || opts.lexicon.is_some_and(|l| is_out_of_lexicon(tok, l)) {
            unintelligible += 1;
        }
        if has_suffix(&tok.lower, opts.suffixes) {
            suffixed += 1;
        }
        if is_numeric(&tok.lower) || NUMBER_WORDS.contains(&tok.lower.as_str()) {
            numbers += 1;
        }
    }
    let v = freq.len() as f64;
    let v1 = freq.values().filter(|&&c| c == 1).count() as f64;
    let entropy: f64 = -freq
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            p * p.log2()
        })
        .sum::<f64>();
    let standardized_word_entropy = if freq.len() > 1 {
        (entropy / v.log2()).clamp(0.0, 1.0)
    } else {
        f64::NAN
    };
    let honore_statistic = if v1 < v {
        100.0 * n.ln() / (1.0 - v1 / v)
    } else {
        f64::NAN
    };
    ComplexityFeatures {
        unintelligible_word_ratio: unintelligible as f64 / n,
        standardized_word_entropy,
        suffix_ratio: suffixed as f64 / n,
        number_ratio: numbers as f64 / n,
        brunet_index: n.powf(v.powf(BRUNET_EXPONENT)),
        honore_statistic,
        type_token_ratio: v / n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textfeat::{tokenize, DEFAULT_SUFFIXES};
    use proptest::prelude::*;
    use std::collections::HashMap;

    const LEX: &str = "the a cat dog sat on mat happiness quickly government nation ability \
                       table careful hopeless one two three and is was very good bad day i we you it";

    fn suffixes() -> Vec<String> {
        DEFAULT_SUFFIXES.iter().map(|s| s.to_string()).collect()
    }

    fn run(text: &str, with_lex: bool) -> ComplexityFeatures {
        let lex: HashSet<String> = LEX.split_whitespace().map(String::from).collect();
        let suf = suffixes();
        complexity(
            &tokenize(text),
            ComplexityOptions {
                lexicon: with_lex.then_some(&lex),
                suffixes: &suf,
            },
        )
    }

    fn same(a: f64, b: f64) -> bool {
        (a.is_nan() && b.is_nan()) || (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    // Values from an independent scripted evaluation of the formulas.
    #[test]
    fn oracle_corpora() {
        let nan = f64::NAN;
        let cases: [(&str, bool, [f64; 7]); 10] = [
            ("the cat sat on the mat", false,
             [0.0, 0.9697238998682473, 0.0, 0.0, 3.950660217403698, 895.8797346140277, 0.8333333333333334]),
            ("the cat sat on the mat xxx the dog", true,
             [0.1111111111111111, 0.9409583900892993, 0.0, 0.0, 4.922408673191891, 1538.0572041353532, 0.7777777777777778]),
            ("happiness government nation quickly", false,
             [0.0, 1.0, 1.0, 0.0, 3.0127333051006895, nan, 1.0]),
            ("one 2 three cats", false,
             [0.0, 1.0, 0.0, 0.75, 3.0127333051006895, nan, 1.0]),
            ("we we we we", false,
             [0.0, nan, 0.0, 0.0, 4.0, 138.62943611198907, 0.25]),
            ("a b c d", false,
             [0.0, 1.0, 0.0, 0.0, 3.0127333051006895, nan, 1.0]),
            ("i was very good and you were bad and it was a good day", true,
             [0.07142857142857142, 0.976687463710328, 0.0, 0.0, 5.910439333857668, 967.6543541922614, 0.7857142857142857]),
            ("xxx [inaudible] xxx okay okay fine", false,
             [0.5, 0.9591479170272447, 0.0, 0.0, 4.159563029973616, 358.351893845611, 0.6666666666666666]),
            ("careful hopeless ability table 1,000 3.5 twenty seventy", true,
             [0.25, 1.0, 0.5, 0.5, 4.373186982084907, nan, 1.0]),
            ("the the the cat cat dog bird fish fish fish fish sadness", false,
             [0.0, 0.9111886696810589, 0.08333333333333333, 0.0, 6.352873532144457, 496.98132995760005, 0.5]),
        ];
        for (text, lex, expect) in cases {
            let got = run(text, lex).values();
            for (i, (g, e)) in got.iter().zip(expect).enumerate() {
                assert!(same(*g, e), "{text:?} {}: {g} vs {e}", COMPLEXITY_NAMES[i]);
            }
        }
    }

    #[test]
    fn brunet_reference_point() {
        let words: Vec<String> = (0..100).map(|i| format!("w{}", i % 50)).collect();
        let f = run(&words.join(" "), false);
        assert!((f.brunet_index - 11.19).abs() < 0.01);
        assert!((f.brunet_index - 11.189676933375944).abs() < 1e-9);
    }

    #[test]
    fn empty_is_all_nan() {
        assert!(run("", false).values().iter().all(|v| v.is_nan()));
    }

    #[test]
    fn entropy_bits_are_reproducible() {
        let text = "the the the cat cat dog bird fish fish fish fish sadness a b c d e f g";
        let first = run(text, false).standardized_word_entropy.to_bits();
        for _ in 0..50 {
            assert_eq!(run(text, false).standardized_word_entropy.to_bits(), first);
        }
    }

    #[test]
    fn nan_like_words_are_not_numbers() {
        assert_eq!(run("nan inf infinity", false).number_ratio, 0.0);
    }

    #[test]
    fn suffix_must_be_proper() {
        assert_eq!(run("ly less tion", false).suffix_ratio, 0.0);
        assert_eq!(run("fly", false).suffix_ratio, 1.0);
    }

    fn multiset() -> impl Strategy<Value = Vec<u8>> {
        prop::collection::vec(0u8..12, 1..80)
    }

    fn words(ids: &[u8]) -> String {
        ids.iter().map(|i| format!("w{i}")).collect::<Vec<_>>().join(" ")
    }

    proptest! {
        #[test]
        fn ratios_in_unit_interval(ids in multiset()) {
            let f = run(&words(&ids), true);
            for v in [f.unintelligible_word_ratio, f.suffix_ratio, f.number_ratio, f.type_token_ratio] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            let e = f.standardized_word_entropy;
            prop_assert!(e.is_nan() || (0.0..=1.0).contains(&e));
            prop_assert!(f.brunet_index > 0.0);
        }

        #[test]
        fn entropy_is_one_iff_equiprobable(ids in multiset()) {
            let f = run(&words(&ids), false);
            let mut counts = HashMap::new();
            for i in &ids { *counts.entry(i).or_insert(0usize) += 1; }
            prop_assume!(counts.len() > 1);
            let equi = counts.values().all(|&c| c == *counts.values().next().unwrap());
            prop_assert_eq!((f.standardized_word_entropy - 1.0).abs() < 1e-12, equi);
        }

        #[test]
        fn brunet_non_increasing_in_v(n in 2usize..400) {
            let b = |v: usize| (n as f64).powf((v as f64).powf(BRUNET_EXPONENT));
            for v in 1..n {
                prop_assert!(b(v + 1) <= b(v));
            }
        }

        #[test]
        fn doubling_at_most_halves_ttr(ids in multiset()) {
            let t = tokenize(&words(&ids));
            let suf = suffixes();
            let opts = ComplexityOptions { lexicon: None, suffixes: &suf };
            let a = complexity(&t, opts).type_token_ratio;
            let b = complexity(&t.doubled(), opts).type_token_ratio;
            prop_assert!(b <= a / 2.0 + 1e-15);
        }
    }
}
