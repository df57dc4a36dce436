use std::path::Path;

use crate::config::PipelineConfig;
use crate::error::CliError;
use crate::output::write_atomic;

/// Writes every emittable feature with its group, status and formula.
pub fn run_featdict(cfg: &PipelineConfig, out: &Path) -> Result<usize, CliError> {
    cfg.validate()?;
    let dict = cfg.dictionary()?;
    write_atomic(out, |w| dict.write_csv(w).map_err(std::io::Error::other))?;
    Ok(dict.active_names().len())
}
