//! Atomic file output: write to a temp file in the target directory, then
//! rename over the destination.

use std::io::Write;
use std::path::Path;

use tempfile::NamedTempFile;

use crate::error::CliError;

pub fn write_atomic<F>(path: &Path, fill: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
{
    let unwritable = |source| CliError::UnwritableOutput {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(unwritable)?;
    {
        let mut w = std::io::BufWriter::new(tmp.as_file_mut());
        fill(&mut w).map_err(unwritable)?;
        w.flush().map_err(unwritable)?;
    }
    tmp.persist(path).map_err(|e| unwritable(e.error))?;
    Ok(())
}

pub fn write_string(path: &Path, text: &str) -> Result<(), CliError> {
    write_atomic(path, |w| w.write_all(text.as_bytes()))
}

pub fn create_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|source| CliError::UnwritableOutput {
        path: path.to_path_buf(),
        source,
    })
}

pub fn csv_io(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}
