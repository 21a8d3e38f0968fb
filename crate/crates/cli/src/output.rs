//! Output directory handling and atomic file writes.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{io_error, CliError, Result};

/// Environment variable that overrides the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "SOILSCAN_OUTPUT_DIR";

#[derive(Debug, Clone)]
pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    /// Creates the directory if needed.
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        std::fs::create_dir_all(&root).map_err(|e| io_error(&root, e))?;
        Ok(OutputDir { root })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn join(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Writes `contents` to `name` inside the directory through a temporary
    /// file that is renamed into place, so readers never see a partial file.
    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        let target = self.join(name);
        let mut tmp = tempfile::Builder::new()
            .prefix(".soilscan-")
            .tempfile_in(&self.root)
            .map_err(|e| io_error(&self.root, e))?;
        tmp.write_all(contents.as_bytes())
            .and_then(|_| tmp.as_file().sync_all())
            .map_err(|e| io_error(&target, e))?;
        tmp.persist(&target).map_err(|e| io_error(&target, e.error))?;
        Ok(target)
    }
}

/// File name of `path` with the given suffixes stripped from its end, used
/// to name derived outputs.
pub fn stem_of(path: &Path, strip: &[&str]) -> Result<String> {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .ok_or_else(|| CliError::input(format!("{}: not a file path", path.display())))?;
    let mut stem = name.as_str();
    for suffix in strip {
        if let Some(s) = stem.strip_suffix(suffix) {
            if !s.is_empty() {
                stem = s;
            }
        }
    }
    Ok(stem.to_string())
}

/// Keeps letters, digits, `-`, `_` and `.`, replacing anything else with `_`.
pub fn sanitize(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' })
        .collect();
    if s.is_empty() {
        "scene".into()
    } else {
        s
    }
}
