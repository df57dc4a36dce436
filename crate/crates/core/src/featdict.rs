//! Every feature the extractor can emit, with its group, formula and
//! whether the current toggles enable it.

use std::io::Write;

use crate::coherence::{coherence_feature_names, CoherenceConfig};
use crate::functionals::{gemaps_feature_names, spectral_feature_names, AcousticConfig, Stat};
use crate::textfeat::{syntax_feature_names, COMPLEXITY_NAMES, SENTIMENT_NAME};

/// Which feature groups are extracted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureToggles {
    pub gemaps_core: bool,
    pub spectral: bool,
    pub complexity: bool,
    pub syntax: bool,
    pub sentiment: bool,
    pub coherence: bool,
}

impl Default for FeatureToggles {
    fn default() -> Self {
        Self {
            gemaps_core: true,
            spectral: true,
            complexity: true,
            syntax: true,
            sentiment: false,
            coherence: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FeatureGroup {
    GemapsCore,
    Spectral,
    Complexity,
    Syntax,
    Sentiment,
    Coherence,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 6] = [
        FeatureGroup::GemapsCore,
        FeatureGroup::Spectral,
        FeatureGroup::Complexity,
        FeatureGroup::Syntax,
        FeatureGroup::Sentiment,
        FeatureGroup::Coherence,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            FeatureGroup::GemapsCore => "gemaps_core",
            FeatureGroup::Spectral => "spectral",
            FeatureGroup::Complexity => "complexity",
            FeatureGroup::Syntax => "syntax",
            FeatureGroup::Sentiment => "sentiment",
            FeatureGroup::Coherence => "coherence",
        }
    }

    pub fn enabled(&self, t: &FeatureToggles) -> bool {
        match self {
            FeatureGroup::GemapsCore => t.gemaps_core,
            FeatureGroup::Spectral => t.spectral,
            FeatureGroup::Complexity => t.complexity,
            FeatureGroup::Syntax => t.syntax,
            FeatureGroup::Sentiment => t.sentiment,
            FeatureGroup::Coherence => t.coherence,
        }
    }

    pub fn is_acoustic(&self) -> bool {
        matches!(self, FeatureGroup::GemapsCore | FeatureGroup::Spectral)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DictionaryEntry {
    pub name: String,
    pub group: FeatureGroup,
    pub active: bool,
    pub formula: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDictionary {
    pub entries: Vec<DictionaryEntry>,
}

fn stat_formula(stat: &str) -> String {
    match stat {
        "mean" => "mean over defined frames".into(),
        "stddev" => "population standard deviation over defined frames".into(),
        "min" => "minimum over defined frames".into(),
        "max" => "maximum over defined frames".into(),
        "median" => "median over defined frames".into(),
        "range" => "max - min over defined frames".into(),
        "slope" => "OLS slope against frame index".into(),
        "delta_mean_abs" => "mean |x[t] - x[t-1]| over adjacent defined frames".into(),
        p if p.starts_with('p') => format!("{}th percentile, linear interpolation", &p[1..]),
        other => other.into(),
    }
}

fn lld_formula(lld: &str) -> String {
    if let Some(b) = lld.strip_prefix("contrast_b") {
        return format!("spectral contrast of octave band {b}: ln of mean top-quantile over mean bottom-quantile band magnitude");
    }
    if let Some(k) = lld.strip_prefix("mfcc") {
        return format!("MFCC {k}: orthonormal DCT-II of log HTK-mel energies");
    }
    match lld {
        "f0_semitone" => "F0 in semitones re 27.5 Hz, 12 log2(f0 / 27.5); unvoiced frames undefined",
        "jitter" => "per-period |T_i - T_{i-1}| / mean T",
        "shimmer" => "per-period |A_i - A_{i-1}| / mean A",
        "hnr" => "harmonics-to-noise ratio 10 log10(r / (1 - r)) at the F0 lag, dB",
        "rms" => "RMS of the windowed frame",
        "slope_0_500" => "least-squares slope of magnitude against frequency over 0-500 Hz",
        "slope_500_1500" => "least-squares slope of magnitude against frequency over 500-1500 Hz",
        "alpha_ratio" => "power in 50-1000 Hz over power in 1-5 kHz, dB",
        "hammarberg_index" => "peak magnitude in 0-2 kHz over peak magnitude in 2-5 kHz, dB",
        "centroid" => "magnitude-weighted mean frequency, Hz",
        "bandwidth" => "magnitude-weighted standard deviation about the centroid, Hz",
        "flatness" => "geometric over arithmetic mean of power",
        "rolloff" => "lowest frequency below which 85% of power lies, Hz",
        "entropy" => "Shannon entropy of the normalized power spectrum over ln(bins)",
        "onset_strength" => "half-wave rectified log-magnitude difference from the previous frame, averaged over bins",
        "zcr" => "sign changes between adjacent raw samples / (frame length - 1)",
        "poly_c0" => "intercept of a linear fit to the magnitude spectrum",
        "poly_c1" => "slope of a linear fit to the magnitude spectrum",
        other => other,
    }
    .into()
}

/// Splits `<lld>_<stat>` using the known stat labels.
fn split_stat(name: &str, stats: &[Stat]) -> Option<(String, String)> {
    stats.iter().find_map(|s| {
        name.strip_suffix(&format!("_{s}"))
            .map(|lld| (lld.to_string(), s.label()))
    })
}

fn summarised(name: &str, prefix: &str, stats: &[Stat]) -> String {
    match split_stat(name, stats) {
        Some((lld, stat)) => {
            let lld = lld.strip_prefix(prefix).unwrap_or(&lld).to_string();
            format!("{}; {}", lld_formula(&lld), stat_formula(&stat))
        }
        None => name.into(),
    }
}

fn gemaps_scalar_formula(name: &str) -> String {
    match name {
        "voiced_fraction" => "voiced pitch frames / all pitch frames",
        "jitter_local" => "mean |T_i - T_{i-1}| / mean T over voiced runs",
        "shimmer_local" => "mean |A_i - A_{i-1}| / mean A over voiced runs",
        "hnr_db" => "mean voiced-frame HNR, dB",
        other => other,
    }
    .into()
}

fn complexity_formula(name: &str) -> &'static str {
    match name {
        "unintelligible_word_ratio" => "(marker tokens + out-of-lexicon tokens) / N",
        "standardized_word_entropy" => "-sum p_w log2 p_w / log2 V; NaN when V = 1",
        "suffix_ratio" => "tokens ending in a configured suffix / N",
        "number_ratio" => "(numeric tokens + number words) / N",
        "brunet_index" => "N ^ (V ^ -0.165)",
        "honore_statistic" => "100 ln N / (1 - V1 / V); NaN when V1 = V",
        "type_token_ratio" => "V / N",
        _ => "",
    }
}

fn syntax_formula(name: &str) -> String {
    let (kind, rest) = name.split_once('_').unwrap_or(("", name));
    let (tag, measure) = rest.rsplit_once('_').unwrap_or((rest, ""));
    let what = if kind == "pos" { "UPOS tag" } else { "dependency relation" };
    match measure {
        "count" => format!("tokens with {what} {tag}"),
        _ => format!("tokens with {what} {tag} / all tokens; NaN without tokens"),
    }
}

fn coherence_formula(name: &str) -> String {
    match name {
        "coh_max_phrase_length" => "most tokens in one sentence".into(),
        "coh_determiner_rate" => "DET-tagged tokens / all tokens; NaN without POS tags".into(),
        _ => {
            let rest = name.trim_start_matches("coh_o");
            let (q, rest) = rest.split_once('_').unwrap_or((rest, ""));
            let (norm, stat) = match rest.strip_prefix("norm_") {
                Some(s) => (true, s),
                None => (false, rest),
            };
            let q: usize = q.parse().unwrap_or(0);
            let base = format!(
                "cosine of mean word vectors of sentences {} apart",
                q + 1
            );
            let base = if norm {
                format!("{base}, minus the mean cosine over all sentence pairs")
            } else {
                base
            };
            format!("{base}; {}", stat_formula(stat).replace("frames", "pairs"))
        }
    }
}

impl FeatureDictionary {
    pub fn build(
        acoustic: &AcousticConfig,
        coherence: &CoherenceConfig,
        toggles: &FeatureToggles,
    ) -> Self {
        let mut entries = Vec::new();
        let mut add = |group: FeatureGroup, name: String, formula: String| {
            entries.push(DictionaryEntry {
                active: group.enabled(toggles),
                name,
                group,
                formula,
            });
        };
        for name in gemaps_feature_names(acoustic) {
            let f = if crate::functionals::GEMAPS_SCALARS.contains(&name.as_str()) {
                gemaps_scalar_formula(&name)
            } else {
                summarised(&name, "", acoustic.gemaps_bank.stats())
            };
            add(FeatureGroup::GemapsCore, name, f);
        }
        for name in spectral_feature_names(acoustic) {
            let f = if name == "spec_tempo_bpm" {
                "argmax of the windowed onset autocorrelation tempogram, 30-300 BPM".into()
            } else {
                summarised(&name, "spec_", acoustic.spectral_bank.stats())
            };
            add(FeatureGroup::Spectral, name, f);
        }
        for name in COMPLEXITY_NAMES {
            add(FeatureGroup::Complexity, name.into(), complexity_formula(name).into());
        }
        for name in syntax_feature_names() {
            let f = syntax_formula(&name);
            add(FeatureGroup::Syntax, name, f);
        }
        add(
            FeatureGroup::Sentiment,
            SENTIMENT_NAME.into(),
            "mean valence of lexicon-matched tokens; NaN without matches".into(),
        );
        for name in coherence_feature_names(&coherence.orders) {
            let f = coherence_formula(&name);
            add(FeatureGroup::Coherence, name, f);
        }
        Self { entries }
    }

    /// Names of active features in extraction column order.
    pub fn active_names(&self) -> Vec<String> {
        self.entries
            .iter()
            .filter(|e| e.active)
            .map(|e| e.name.clone())
            .collect()
    }

    pub fn get(&self, name: &str) -> Option<&DictionaryEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// CSV with columns `name,group,status,formula`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["name", "group", "status", "formula"])?;
        for e in &self.entries {
            w.write_record([
                e.name.as_str(),
                e.group.label(),
                if e.active { "active" } else { "inactive" },
                e.formula.as_str(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
