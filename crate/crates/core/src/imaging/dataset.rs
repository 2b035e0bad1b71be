use std::fs;
use std::path::{Path, PathBuf};

use super::{binarize, load_pgm, BinarizeConfig, ImageError};
use crate::pattern::BinaryPattern;

/// A file that could not be turned into a pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileDiagnostic {
    pub path: PathBuf,
    pub error: ImageError,
}

impl std::fmt::Display for FileDiagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path.display(), self.error)
    }
}

/// Patterns loaded from disk plus the per-file failures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Loaded<T> {
    pub items: Vec<T>,
    pub diagnostics: Vec<FileDiagnostic>,
}

impl<T> Default for Loaded<T> {
    fn default() -> Self {
        Self {
            items: Vec::new(),
            diagnostics: Vec::new(),
        }
    }
}

fn io_error(path: &Path, err: std::io::Error) -> ImageError {
    ImageError::Io {
        path: path.display().to_string(),
        message: err.to_string(),
    }
}

fn is_pgm(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
}

/// Entries of `dir` sorted by file name.
fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>, ImageError> {
    let mut paths = fs::read_dir(dir)
        .map_err(|e| io_error(dir, e))?
        .map(|entry| entry.map(|e| e.path()).map_err(|e| io_error(dir, e)))
        .collect::<Result<Vec<_>, _>>()?;
    paths.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(paths)
}

/// Reads a PGM file and binarizes it.
pub fn load_pattern(path: &Path, cfg: &BinarizeConfig) -> Result<BinaryPattern, ImageError> {
    let bytes = fs::read(path).map_err(|e| io_error(path, e))?;
    let img = load_pgm(&bytes)?;
    Ok(binarize(&img, cfg))
}

/// Every `.pgm` file directly inside `dir`, in file-name order.
pub fn load_image_folder(
    dir: &Path,
    cfg: &BinarizeConfig,
) -> Result<Loaded<BinaryPattern>, ImageError> {
    let mut out = Loaded::default();
    for path in sorted_entries(dir)? {
        if !path.is_file() || !is_pgm(&path) {
            continue;
        }
        match load_pattern(&path, cfg) {
            Ok(p) => out.items.push(p),
            Err(error) => out.diagnostics.push(FileDiagnostic { path, error }),
        }
    }
    Ok(out)
}

/// A directory whose immediate subdirectories name the labels and hold the
/// `.pgm` examples. Ordered by label, then file name.
pub fn load_labeled_dir(
    dir: &Path,
    cfg: &BinarizeConfig,
) -> Result<Loaded<(String, BinaryPattern)>, ImageError> {
    let mut out = Loaded::default();
    for sub in sorted_entries(dir)? {
        if !sub.is_dir() {
            continue;
        }
        let Some(label) = sub.file_name().and_then(|n| n.to_str()).map(str::to_owned) else {
            continue;
        };
        match load_image_folder(&sub, cfg) {
            Ok(loaded) => {
                out.items
                    .extend(loaded.items.into_iter().map(|p| (label.clone(), p)));
                out.diagnostics.extend(loaded.diagnostics);
            }
            Err(error) => out.diagnostics.push(FileDiagnostic { path: sub, error }),
        }
    }
    Ok(out)
}
