//! Small filesystem helpers that attach the offending path to every error.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::{CliError, CliResult};

pub fn create_dir_all(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

pub fn open(path: &Path) -> CliResult<fs::File> {
    fs::File::open(path).map_err(|e| CliError::io(path, e))
}

pub fn read_to_string(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Writes `bytes` to a sibling temporary file and renames it into place, so
/// an interrupted run never leaves a truncated result behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir_all(parent)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = Path::new(&tmp);
    let mut f = fs::File::create(tmp).map_err(|e| CliError::io(tmp, e))?;
    f.write_all(bytes).map_err(|e| CliError::io(tmp, e))?;
    f.sync_all().map_err(|e| CliError::io(tmp, e))?;
    fs::rename(tmp, path).map_err(|e| CliError::io(path, e))
}

/// Runs `emit` against an in-memory buffer and writes the result atomically.
pub fn write_with<F>(path: &Path, emit: F) -> CliResult<()>
where
    F: FnOnce(&mut Vec<u8>) -> eqnn_core::Result<()>,
{
    let mut buf = Vec::new();
    emit(&mut buf)?;
    write_atomic(path, &buf)
}
