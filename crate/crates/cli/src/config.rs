//! Declarative pipeline configuration, loaded from JSON and validated
//! before any work starts.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use voicemark::audio_io::{FrameConfig, WindowKind};
use voicemark::coherence::CoherenceConfig;
use voicemark::featdict::{FeatureDictionary, FeatureToggles};
use voicemark::functionals::{AcousticConfig, FunctionalBank};
use voicemark::mlpipe::{ImportanceThreshold, Selector, TargetKind};
use voicemark::textfeat::DEFAULT_UNINTELLIGIBLE_MARKERS;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrameSection {
    pub frame_ms: f64,
    pub hop_ms: f64,
    pub window: String,
}

impl Default for FrameSection {
    fn default() -> Self {
        Self {
            frame_ms: 25.0,
            hop_ms: 10.0,
            window: "hann".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureSection {
    pub gemaps_core: bool,
    pub spectral: bool,
    pub complexity: bool,
    pub syntax: bool,
    pub sentiment: bool,
    pub coherence: bool,
}

impl Default for FeatureSection {
    fn default() -> Self {
        let t = FeatureToggles::default();
        Self {
            gemaps_core: t.gemaps_core,
            spectral: t.spectral,
            complexity: t.complexity,
            syntax: t.syntax,
            sentiment: t.sentiment,
            coherence: t.coherence,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FunctionalSection {
    pub gemaps: Vec<String>,
    pub spectral: Vec<String>,
}

impl Default for FunctionalSection {
    fn default() -> Self {
        let labels = |b: FunctionalBank| b.stats().iter().map(|s| s.label()).collect();
        Self {
            gemaps: labels(FunctionalBank::mean_stddev()),
            spectral: labels(FunctionalBank::summary()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PitchSection {
    pub f0_min_hz: f64,
    pub f0_max_hz: f64,
}

impl Default for PitchSection {
    fn default() -> Self {
        let a = AcousticConfig::default();
        Self {
            f0_min_hz: a.f0_min_hz,
            f0_max_hz: a.f0_max_hz,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResourceSection {
    /// Word vectors, required when coherence is enabled.
    pub embeddings: Option<PathBuf>,
    /// `word,valence` CSV, required when sentiment is enabled.
    pub valence_lexicon: Option<PathBuf>,
    /// Known-word list; tokens outside it count as unintelligible.
    pub dictionary: Option<PathBuf>,
    /// Suffix list replacing the default English suffixes.
    pub suffixes: Option<PathBuf>,
    pub unintelligible_markers: Vec<String>,
}

impl Default for ResourceSection {
    fn default() -> Self {
        Self {
            embeddings: None,
            valence_lexicon: None,
            dictionary: None,
            suffixes: None,
            unintelligible_markers: DEFAULT_UNINTELLIGIBLE_MARKERS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoherenceSection {
    pub orders: Vec<usize>,
    pub base_distance: usize,
}

impl Default for CoherenceSection {
    fn default() -> Self {
        let c = CoherenceConfig::default();
        Self {
            orders: c.orders,
            base_distance: c.base_distance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TaskSpec {
    #[default]
    Auto,
    Classification,
    Regression,
}

impl TaskSpec {
    pub fn kind(&self) -> Option<TargetKind> {
        match self {
            TaskSpec::Auto => None,
            TaskSpec::Classification => Some(TargetKind::Classification),
            TaskSpec::Regression => Some(TargetKind::Regression),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FilterSpec {
    LowVariance { threshold: f64 },
    HighCorrelation { threshold: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TransformSpec {
    Pca { k: usize },
    Ica {
        k: usize,
        #[serde(default = "default_ica_iter")]
        max_iter: usize,
        #[serde(default = "default_ica_tol")]
        tol: f64,
    },
    FactorAnalysis {
        k: usize,
        #[serde(default = "default_fa_iter")]
        max_iter: usize,
        #[serde(default = "default_fa_tol")]
        tol: f64,
    },
}

fn default_ica_iter() -> usize {
    500
}
fn default_ica_tol() -> f64 {
    1e-6
}
fn default_fa_iter() -> usize {
    voicemark::mlpipe::FA_MAX_ITER
}
fn default_fa_tol() -> f64 {
    voicemark::mlpipe::FA_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum SelectionSpec {
    Anova { k: usize },
    Rfe { k: usize },
    Mrmr { k: usize },
    /// `threshold` is a number or "mean".
    Importance { threshold: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub selector: String,
    /// Defaults to 1, 2, 4, .. up to the column count.
    #[serde(default)]
    pub k_values: Option<Vec<usize>>,
    #[serde(default = "default_folds")]
    pub folds: usize,
}

fn default_folds() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlotSection {
    /// Columns for the scatter plot; defaults to the first two columns.
    pub scatter: Option<(String, String)>,
    pub bins: usize,
    /// Most columns drawn in the heat map, scatter matrix and swarm plot.
    pub max_columns: usize,
}

impl Default for PlotSection {
    fn default() -> Self {
        Self {
            scatter: None,
            bins: voicemark::mlpipe::DEFAULT_BINS,
            max_columns: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    pub task: TaskSpec,
    pub filters: Vec<FilterSpec>,
    pub transform: Option<TransformSpec>,
    pub selection: Option<SelectionSpec>,
    pub curve: Option<CurveSpec>,
    pub plots: PlotSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub frame: FrameSection,
    pub features: FeatureSection,
    pub functionals: FunctionalSection,
    pub pitch: PitchSection,
    pub resources: ResourceSection,
    pub coherence: CoherenceSection,
    pub analysis: AnalysisSection,
    pub seed: u64,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Checks ranges, parses every named option and confirms that the
    /// referenced resource files exist.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.acoustic()?;
        let f = &self.features;
        if !(f.gemaps_core || f.spectral || f.complexity || f.syntax || f.sentiment || f.coherence) {
            return Err(invalid("every feature group is disabled"));
        }
        let r = &self.resources;
        if f.coherence && r.embeddings.is_none() {
            return Err(invalid("coherence features need resources.embeddings"));
        }
        if f.sentiment && r.valence_lexicon.is_none() {
            return Err(invalid("sentiment features need resources.valence_lexicon"));
        }
        for p in [&r.embeddings, &r.valence_lexicon, &r.dictionary, &r.suffixes].into_iter().flatten() {
            if !p.is_file() {
                return Err(invalid(format!("resource file {} does not exist", p.display())));
            }
        }
        if self.coherence.orders.is_empty() || self.coherence.base_distance == 0 {
            return Err(invalid("coherence needs at least one order and base_distance >= 1"));
        }
        let mut seen = HashSet::new();
        if !self.coherence.orders.iter().all(|q| seen.insert(q)) {
            return Err(invalid("coherence orders must be distinct"));
        }
        self.validate_analysis()
    }

    fn validate_analysis(&self) -> Result<(), ConfigError> {
        let a = &self.analysis;
        for filt in &a.filters {
            match filt {
                FilterSpec::LowVariance { threshold } if !(*threshold >= 0.0 && threshold.is_finite()) => {
                    return Err(invalid("low_variance threshold must be a finite value >= 0"))
                }
                FilterSpec::HighCorrelation { threshold } if !(*threshold > 0.0 && *threshold < 1.0) => {
                    return Err(invalid("high_correlation threshold must be in (0, 1)"))
                }
                _ => {}
            }
        }
        match &a.transform {
            Some(TransformSpec::Pca { k } | TransformSpec::Ica { k, .. } | TransformSpec::FactorAnalysis { k, .. })
                if *k == 0 =>
            {
                return Err(invalid("transform k must be >= 1"))
            }
            Some(TransformSpec::Ica { max_iter, tol, .. } | TransformSpec::FactorAnalysis { max_iter, tol, .. })
                if *max_iter == 0 || *tol <= 0.0 || tol.is_nan() =>
            {
                return Err(invalid("transform max_iter and tol must be positive"))
            }
            _ => {}
        }
        match &a.selection {
            Some(SelectionSpec::Anova { k } | SelectionSpec::Rfe { k } | SelectionSpec::Mrmr { k }) if *k == 0 => {
                return Err(invalid("selection k must be >= 1"))
            }
            Some(SelectionSpec::Importance { threshold }) => {
                threshold.parse::<ImportanceThreshold>().map_err(invalid)?;
            }
            _ => {}
        }
        if let Some(c) = &a.curve {
            c.selector.parse::<Selector>().map_err(invalid)?;
            if c.folds < 2 {
                return Err(invalid("curve folds must be >= 2"));
            }
            if c.k_values.as_ref().is_some_and(|ks| ks.is_empty() || ks.contains(&0)) {
                return Err(invalid("curve k_values must be non-empty and positive"));
            }
        }
        if a.plots.bins == 0 || a.plots.max_columns < 2 {
            return Err(invalid("plots need bins >= 1 and max_columns >= 2"));
        }
        Ok(())
    }

    pub fn acoustic(&self) -> Result<AcousticConfig, ConfigError> {
        let window = self.frame.window.parse::<WindowKind>().map_err(|e| invalid(e.to_string()))?;
        let fr = &self.frame;
        if !(fr.frame_ms > 0.0 && fr.hop_ms > 0.0 && fr.hop_ms <= fr.frame_ms) {
            return Err(invalid("need 0 < hop_ms <= frame_ms"));
        }
        let p = &self.pitch;
        if !(p.f0_min_hz > 0.0 && p.f0_min_hz < p.f0_max_hz) {
            return Err(invalid("need 0 < f0_min_hz < f0_max_hz"));
        }
        Ok(AcousticConfig {
            frame: FrameConfig {
                frame_ms: fr.frame_ms,
                hop_ms: fr.hop_ms,
                window,
            },
            f0_min_hz: p.f0_min_hz,
            f0_max_hz: p.f0_max_hz,
            gemaps_bank: FunctionalBank::parse(&self.functionals.gemaps)
                .map_err(|e| invalid(format!("functionals.gemaps: {e}")))?,
            spectral_bank: FunctionalBank::parse(&self.functionals.spectral)
                .map_err(|e| invalid(format!("functionals.spectral: {e}")))?,
            ..AcousticConfig::default()
        })
    }

    pub fn toggles(&self) -> FeatureToggles {
        let f = &self.features;
        FeatureToggles {
            gemaps_core: f.gemaps_core,
            spectral: f.spectral,
            complexity: f.complexity,
            syntax: f.syntax,
            sentiment: f.sentiment,
            coherence: f.coherence,
        }
    }

    pub fn coherence_config(&self) -> CoherenceConfig {
        CoherenceConfig {
            orders: self.coherence.orders.clone(),
            base_distance: self.coherence.base_distance,
        }
    }

    pub fn dictionary(&self) -> Result<FeatureDictionary, ConfigError> {
        Ok(FeatureDictionary::build(
            &self.acoustic()?,
            &self.coherence_config(),
            &self.toggles(),
        ))
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(json.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
