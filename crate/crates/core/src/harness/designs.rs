use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::points::{load_point_file, PointSet};

/// Directory of design files named `ssTTT.NNNNN` (degree, point count).
#[derive(Debug)]
pub struct DesignLibrary {
    dir: PathBuf,
    cache: Mutex<HashMap<u32, PointSet>>,
}

impl DesignLibrary {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: dir.into(),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Path of the file holding the degree-`t` design, if present.
    pub fn path_for(&self, t: u32) -> Result<PathBuf> {
        let prefix = format!("ss{t:03}.");
        let entries = fs::read_dir(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let mut found: Vec<PathBuf> = entries
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with(&prefix))
            })
            .collect();
        found.sort();
        found
            .into_iter()
            .next()
            .ok_or_else(|| Error::MissingFile(self.dir.join(format!("{prefix}*"))))
    }

    /// Loads the degree-`t` design and tags it with its degree.
    pub fn load(&self, t: u32) -> Result<PointSet> {
        if let Some(set) = self.cache.lock().expect("cache lock").get(&t) {
            return Ok(set.clone());
        }
        let set = load_point_file(self.path_for(t)?)?.with_design_degree(t);
        self.cache
            .lock()
            .expect("cache lock")
            .insert(t, set.clone());
        Ok(set)
    }
}
