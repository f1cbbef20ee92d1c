//! Staged output. Commands collect every file in memory and only touch the
//! output directory once the run has succeeded.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Default)]
pub struct Staged {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Staged {
    pub fn text(&mut self, rel: impl Into<PathBuf>, body: String) {
        self.files.push((rel.into(), body.into_bytes()));
    }

    pub fn json<T: Serialize>(&mut self, rel: impl Into<PathBuf>, value: &T) -> Result<()> {
        let mut body = serde_json::to_vec_pretty(value)?;
        body.push(b'\n');
        self.files.push((rel.into(), body));
        Ok(())
    }

    /// Writes each file through a temporary name and renames it in place.
    pub fn commit(self, out: &Path) -> Result<()> {
        for (rel, body) in self.files {
            let target = out.join(&rel);
            if let Some(dir) = target.parent() {
                fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            }
            let tmp = target.with_extension("partial");
            fs::write(&tmp, body).map_err(|e| CliError::io(&tmp, e))?;
            fs::rename(&tmp, &target).map_err(|e| CliError::io(&target, e))?;
        }
        Ok(())
    }
}

/// `<dir>/<prefix>_<index>.<ext>` with a five-digit index.
pub fn numbered(dir: &str, prefix: &str, index: usize, ext: &str) -> String {
    format!("{dir}/{prefix}_{index:05}.{ext}")
}
