//! Batch feature extraction from a directory of WAV recordings and their
//! transcripts.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use voicemark::audio_io::load_wav;
use voicemark::coherence::{coherence_features_with, load_embeddings, CoherenceConfig, EmbeddingTable};
use voicemark::functionals::{AcousticConfig, FeatureVector, FrameAnalysis};
use voicemark::mlpipe::{FeatureTable, Target};
use voicemark::textfeat::{
    complexity, load_conllu, load_suffix_list, load_valence_lexicon, load_word_list, sentiment, syntax_counts,
    tokenize_with, ComplexityOptions, Transcript, COMPLEXITY_NAMES, DEFAULT_SUFFIXES, SENTIMENT_NAME,
};

use crate::config::PipelineConfig;
use crate::error::CliError;
use crate::output::{write_atomic, write_string};

#[derive(Debug, Clone)]
pub struct ExtractOptions {
    pub audio_dir: PathBuf,
    /// Where `<stem>.conllu` or `<stem>.txt` transcripts live. Defaults to
    /// the audio directory.
    pub transcript_dir: Option<PathBuf>,
    /// CSV `source_id,transcript` overriding basename pairing.
    pub pairs: Option<PathBuf>,
    /// CSV `source_id,label` providing the target column.
    pub labels: Option<PathBuf>,
    pub out_csv: PathBuf,
    /// Worker threads; 0 means one per logical core.
    pub jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputStatus {
    Ok,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputRecord {
    pub source_id: String,
    pub audio: PathBuf,
    pub transcript: Option<PathBuf>,
    pub status: InputStatus,
    pub message: Option<String>,
    pub warnings: Vec<String>,
    /// Non-NaN features emitted for this input.
    pub n_finite_features: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub output_csv: PathBuf,
    pub n_rows: usize,
    pub n_features: usize,
    pub wall_time_seconds: f64,
    pub inputs: Vec<InputRecord>,
}

impl RunManifest {
    pub fn all_ok(&self) -> bool {
        self.inputs.iter().all(|r| r.status == InputStatus::Ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InputRecord> + '_ {
        self.inputs.iter().filter(|r| r.status == InputStatus::Error)
    }
}

/// Manifest path for an output CSV: `features.csv` -> `features.manifest.json`.
pub fn manifest_path(out_csv: &Path) -> PathBuf {
    out_csv.with_extension("manifest.json")
}

struct Resources {
    lexicon: Option<HashSet<String>>,
    suffixes: Vec<String>,
    markers: HashSet<String>,
    valence: Option<HashMap<String, f64>>,
    embeddings: Option<EmbeddingTable>,
}

fn resource_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Resource {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

impl Resources {
    fn load(cfg: &PipelineConfig) -> Result<Self, CliError> {
        let r = &cfg.resources;
        let lexicon = match &r.dictionary {
            Some(p) => Some(load_word_list(p).map_err(|e| resource_err(p, e))?),
            None => None,
        };
        let suffixes = match &r.suffixes {
            Some(p) => load_suffix_list(p).map_err(|e| resource_err(p, e))?,
            None => DEFAULT_SUFFIXES.iter().map(|s| s.to_string()).collect(),
        };
        let valence = match (&r.valence_lexicon, cfg.features.sentiment) {
            (Some(p), true) => {
                let lex = load_valence_lexicon(p).map_err(|e| resource_err(p, e))?;
                if lex.is_empty() {
                    return Err(resource_err(p, "valence lexicon is empty"));
                }
                Some(lex)
            }
            _ => None,
        };
        let embeddings = match (&r.embeddings, cfg.features.coherence) {
            (Some(p), true) => Some(load_embeddings(p).map_err(|e| resource_err(p, e))?),
            _ => None,
        };
        Ok(Self {
            lexicon,
            suffixes,
            markers: r.unintelligible_markers.iter().map(|m| m.to_lowercase()).collect(),
            valence,
            embeddings,
        })
    }
}

struct Job {
    source_id: String,
    audio: PathBuf,
    transcript: Option<PathBuf>,
}

struct Outcome {
    record: InputRecord,
    values: Option<Vec<f64>>,
}

fn is_wav(p: &Path) -> bool {
    p.is_file() && p.extension().is_some_and(|e| e.eq_ignore_ascii_case("wav"))
}

fn list_wavs(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|source| CliError::Read {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut wavs: Vec<PathBuf> = entries.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| is_wav(p)).collect();
    wavs.sort();
    Ok(wavs)
}

fn stem(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn read_pairs(path: &Path) -> Result<HashMap<String, PathBuf>, CliError> {
    let base = path.parent().unwrap_or(Path::new("."));
    let mut rdr = csv::Reader::from_path(path).map_err(|e| resource_err(path, e))?;
    let mut out = HashMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| resource_err(path, e))?;
        if rec.len() < 2 {
            return Err(resource_err(path, "expected source_id,transcript"));
        }
        let t = PathBuf::from(rec[1].trim());
        out.insert(rec[0].trim().to_string(), if t.is_relative() { base.join(t) } else { t });
    }
    Ok(out)
}

fn read_labels(path: &Path) -> Result<HashMap<String, f64>, CliError> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| resource_err(path, e))?;
    let mut out = HashMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| resource_err(path, e))?;
        if rec.len() < 2 {
            return Err(resource_err(path, format!("row {}: expected source_id,label", i + 2)));
        }
        let v: f64 = rec[1]
            .trim()
            .parse()
            .map_err(|_| resource_err(path, format!("row {}: label {:?} is not a number", i + 2, &rec[1])))?;
        out.insert(rec[0].trim().to_string(), v);
    }
    Ok(out)
}

fn find_transcript(dir: &Path, id: &str) -> Option<PathBuf> {
    ["conllu", "txt"]
        .iter()
        .map(|ext| dir.join(format!("{id}.{ext}")))
        .find(|p| p.is_file())
}

fn load_transcript(path: &Path, markers: &HashSet<String>) -> Result<Transcript, String> {
    let is_conllu = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("conllu"));
    if is_conllu {
        let mut t = load_conllu(path).map_err(|e| e.to_string())?;
        mark_conllu_tokens(&mut t, markers);
        Ok(t)
    } else {
        let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        Ok(tokenize_with(&text, markers))
    }
}

/// CoNLL-U forms are not run through the tokenizer, so marker flags are
/// applied here.
fn mark_conllu_tokens(t: &mut Transcript, markers: &HashSet<String>) {
    let sentences = t
        .sentences()
        .iter()
        .map(|s| {
            s.iter()
                .cloned()
                .map(|mut tok| {
                    tok.is_unintelligible |= markers.contains(&tok.lower);
                    tok
                })
                .collect()
        })
        .collect();
    *t = Transcript::new(sentences);
}

struct Extractor<'a> {
    cfg: &'a PipelineConfig,
    acoustic: AcousticConfig,
    coherence: CoherenceConfig,
    res: Resources,
    header: Vec<String>,
    text_names: Vec<String>,
}

impl Extractor<'_> {
    fn wants_text(&self) -> bool {
        !self.text_names.is_empty()
    }

    fn run(&self, job: &Job) -> Outcome {
        let mut warnings = Vec::new();
        let result = self.features(job, &mut warnings);
        let (status, message, values) = match result {
            Ok(v) => (InputStatus::Ok, None, Some(v)),
            Err(m) => (InputStatus::Error, Some(m), None),
        };
        Outcome {
            record: InputRecord {
                source_id: job.source_id.clone(),
                audio: job.audio.clone(),
                transcript: job.transcript.clone(),
                status,
                message,
                warnings,
                n_finite_features: values.as_ref().map_or(0, |v| v.iter().filter(|x| x.is_finite()).count()),
            },
            values,
        }
    }

    fn features(&self, job: &Job, warnings: &mut Vec<String>) -> Result<Vec<f64>, String> {
        let toggles = &self.cfg.features;
        let mut fv = FeatureVector::new(&job.source_id);
        if toggles.gemaps_core || toggles.spectral {
            let buf = load_wav(&job.audio).map_err(|e| format!("audio: {e}"))?;
            let fa = FrameAnalysis::new(&buf, &self.acoustic).map_err(|e| format!("framing: {e}"))?;
            if toggles.gemaps_core {
                fv.extend(fa.gemaps_core().map_err(|e| format!("gemaps_core: {e}"))?);
            }
            if toggles.spectral {
                fv.extend(fa.spectral_set().map_err(|e| format!("spectral: {e}"))?);
            }
        }
        if self.wants_text() {
            match &job.transcript {
                Some(path) => {
                    let t = load_transcript(path, &self.res.markers)
                        .map_err(|e| format!("transcript {}: {e}", path.display()))?;
                    fv.extend(self.text_features(&job.source_id, &t)?);
                }
                None => {
                    let msg = format!("{}: no transcript found, text features are NaN", job.source_id);
                    log::warn!("{msg}");
                    warnings.push(msg);
                    fv.extend(FeatureVector::nan_filled(&job.source_id, &self.text_names));
                }
            }
        }
        if fv.names() != self.header.as_slice() {
            return Err("emitted feature names do not match the configured header".into());
        }
        Ok(fv.values().to_vec())
    }

    fn text_features(&self, id: &str, t: &Transcript) -> Result<FeatureVector, String> {
        let toggles = &self.cfg.features;
        let mut fv = FeatureVector::new(id);
        if toggles.complexity {
            let c = complexity(
                t,
                ComplexityOptions {
                    lexicon: self.res.lexicon.as_ref(),
                    suffixes: &self.res.suffixes,
                },
            );
            for (name, v) in COMPLEXITY_NAMES.iter().zip(c.values()) {
                fv.push(*name, v);
            }
        }
        if toggles.syntax {
            fv.extend(syntax_counts(t).to_features());
        }
        if let (true, Some(lex)) = (toggles.sentiment, &self.res.valence) {
            fv.push(SENTIMENT_NAME, sentiment(t, lex).map_err(|e| format!("sentiment: {e}"))?);
        }
        if let (true, Some(emb)) = (toggles.coherence, &self.res.embeddings) {
            fv.extend(coherence_features_with(t, emb, &self.coherence).to_features());
        }
        Ok(fv)
    }
}

/// Extracts one row per recording, writes the CSV and its manifest
/// atomically and returns the manifest. Per-input failures are recorded in
/// the manifest rather than aborting the run.
pub fn run_extract(cfg: &PipelineConfig, opts: &ExtractOptions) -> Result<RunManifest, CliError> {
    let start = Instant::now();
    cfg.validate()?;
    let wavs = list_wavs(&opts.audio_dir)?;
    if wavs.is_empty() {
        return Err(CliError::NoInputs(opts.audio_dir.clone()));
    }
    let dictionary = cfg.dictionary()?;
    let header = dictionary.active_names();
    let text_names: Vec<String> = header
        .iter()
        .filter(|n| dictionary.get(n).is_some_and(|e| !e.group.is_acoustic()))
        .cloned()
        .collect();
    let extractor = Extractor {
        cfg,
        acoustic: cfg.acoustic()?,
        coherence: cfg.coherence_config(),
        res: Resources::load(cfg)?,
        header,
        text_names,
    };
    let pairs = match &opts.pairs {
        Some(p) => read_pairs(p)?,
        None => HashMap::new(),
    };
    let labels = match &opts.labels {
        Some(p) => Some(read_labels(p)?),
        None => None,
    };
    let transcript_dir = opts.transcript_dir.as_deref().unwrap_or(&opts.audio_dir);

    let mut seen = HashSet::new();
    let mut jobs = Vec::new();
    let mut duplicates = Vec::new();
    for audio in wavs {
        let source_id = stem(&audio);
        let transcript = if extractor.wants_text() {
            match pairs.get(&source_id) {
                Some(p) => Some(p.clone()).filter(|p| p.is_file()),
                None => find_transcript(transcript_dir, &source_id),
            }
        } else {
            None
        };
        let job = Job {
            source_id,
            audio,
            transcript,
        };
        if seen.insert(job.source_id.clone()) {
            jobs.push(job);
        } else {
            duplicates.push(job);
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .expect("thread pool");
    let mut outcomes: Vec<Outcome> = pool.install(|| jobs.par_iter().map(|j| extractor.run(j)).collect());
    for d in duplicates {
        outcomes.push(Outcome {
            record: InputRecord {
                message: Some(format!("duplicate source id {:?}", d.source_id)),
                source_id: d.source_id,
                audio: d.audio,
                transcript: d.transcript,
                status: InputStatus::Error,
                warnings: Vec::new(),
                n_finite_features: 0,
            },
            values: None,
        });
    }
    if let Some(labels) = &labels {
        for o in outcomes.iter_mut().filter(|o| o.values.is_some()) {
            if !labels.contains_key(&o.record.source_id) {
                o.values = None;
                o.record.status = InputStatus::Error;
                o.record.message = Some("no label for this source id".into());
                o.record.n_finite_features = 0;
            }
        }
    }
    outcomes.sort_by(|a, b| a.record.source_id.cmp(&b.record.source_id).then(a.record.audio.cmp(&b.record.audio)));

    let ok: Vec<&Outcome> = outcomes.iter().filter(|o| o.values.is_some()).collect();
    let ids: Vec<String> = ok.iter().map(|o| o.record.source_id.clone()).collect();
    let p = extractor.header.len();
    let data = DMatrix::from_fn(ok.len(), p, |i, j| ok[i].values.as_ref().expect("ok row")[j]);
    let target = match &labels {
        Some(l) if !ids.is_empty() => Some(
            Target::inferred(ids.iter().map(|id| l[id]).collect()).map_err(|e| CliError::Schema(e.to_string()))?,
        ),
        _ => None,
    };
    let table = FeatureTable::new(ids, extractor.header.clone(), data, target)
        .map_err(|e| CliError::Schema(e.to_string()))?;
    write_atomic(&opts.out_csv, |w| table.write_csv_to(w).map_err(std::io::Error::other))?;

    let manifest = RunManifest {
        config_hash: cfg.hash(),
        output_csv: opts.out_csv.clone(),
        n_rows: table.n_rows(),
        n_features: p,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        inputs: outcomes.into_iter().map(|o| o.record).collect(),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_string(&manifest_path(&opts.out_csv), &json)?;
    for f in manifest.failures() {
        log::error!("{}: {}", f.source_id, f.message.as_deref().unwrap_or("failed"));
    }
    Ok(manifest)
}

/// Per-group feature counts of a header, for logging.
pub fn group_counts(cfg: &PipelineConfig) -> Result<BTreeMap<String, usize>, CliError> {
    let dict = cfg.dictionary()?;
    let mut out = BTreeMap::new();
    for name in dict.active_names() {
        if let Some(e) = dict.get(&name) {
            *out.entry(e.group.label().to_string()).or_insert(0) += 1;
        }
    }
    Ok(out)
}
