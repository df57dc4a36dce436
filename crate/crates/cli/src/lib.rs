//! Command-line batch extraction, analysis and feature documentation.

pub mod analyze;
pub mod config;
pub mod error;
pub mod extract;
pub mod featdict;
pub mod output;
pub mod svg;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use analyze::{run_analyze, AnalysisReport};
pub use config::PipelineConfig;
pub use error::CliError;
pub use extract::{manifest_path, run_extract, ExtractOptions, InputStatus, RunManifest};
pub use featdict::run_featdict;

/// Exit code when some inputs failed but the run completed.
pub const EXIT_PARTIAL: i32 = 1;
/// Exit code when the run could not complete.
pub const EXIT_FATAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "voicemark", version, about = "Voice and transcript biomarker features")]
pub struct Cli {
    /// JSON pipeline configuration; defaults apply when omitted.
    #[arg(long, global = true, env = "VOICEMARK_CONFIG")]
    pub config: Option<PathBuf>,
    /// Worker threads for extraction; 0 uses every logical core.
    #[arg(long, global = true, env = "VOICEMARK_JOBS", default_value_t = 0)]
    pub jobs: usize,
    /// Overrides the configured seed.
    #[arg(long, global = true, env = "VOICEMARK_SEED")]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract one feature row per WAV recording.
    Extract {
        #[arg(long)]
        audio_dir: PathBuf,
        /// Directory of `<stem>.conllu` or `<stem>.txt`; defaults to the audio directory.
        #[arg(long)]
        transcript_dir: Option<PathBuf>,
        /// CSV `source_id,transcript` overriding basename pairing.
        #[arg(long)]
        pairs: Option<PathBuf>,
        /// CSV `source_id,label` supplying the target column.
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Filter, transform, select and cross-validate a feature CSV.
    Analyze {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Write the feature dictionary CSV.
    Featdict {
        #[arg(long)]
        out: PathBuf,
    },
}

impl Cli {
    pub fn pipeline_config(&self) -> Result<PipelineConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32, CliError> {
    let cfg = cli.pipeline_config()?;
    match &cli.command {
        Command::Extract {
            audio_dir,
            transcript_dir,
            pairs,
            labels,
            out,
        } => {
            let manifest = run_extract(
                &cfg,
                &ExtractOptions {
                    audio_dir: audio_dir.clone(),
                    transcript_dir: transcript_dir.clone(),
                    pairs: pairs.clone(),
                    labels: labels.clone(),
                    out_csv: out.clone(),
                    jobs: cli.jobs,
                },
            )?;
            let failed = manifest.failures().count();
            log::info!(
                "{} rows x {} features written to {} in {:.2}s",
                manifest.n_rows,
                manifest.n_features,
                out.display(),
                manifest.wall_time_seconds
            );
            for f in manifest.failures() {
                eprintln!("error: {}: {}", f.audio.display(), f.message.as_deref().unwrap_or("failed"));
            }
            Ok(if failed == 0 { 0 } else { EXIT_PARTIAL })
        }
        Command::Analyze { features, out_dir } => {
            let report = run_analyze(&cfg, features, out_dir)?;
            log::info!(
                "{} features kept; outputs in {}",
                report.kept_features.len(),
                out_dir.display()
            );
            Ok(0)
        }
        Command::Featdict { out } => {
            let n = run_featdict(&cfg, out)?;
            log::info!("{n} active features documented in {}", out.display());
            Ok(0)
        }
    }
}
