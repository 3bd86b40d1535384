//! The tables available under a dataset root.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tabqa_core::eval::read_header;
use walkdir::WalkDir;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableEntry {
    /// Path relative to the dataset root with `/` separators, as used in the
    /// dataset's context column.
    pub id: String,
    pub headings: Vec<String>,
}

#[derive(Clone, Debug, Default)]
pub struct Catalog {
    root: PathBuf,
    entries: BTreeMap<String, TableEntry>,
}

impl Catalog {
    /// Every `.csv` file below `root`. Files whose header cannot be read are
    /// skipped with a warning.
    pub fn scan(root: &Path) -> Catalog {
        let mut entries = BTreeMap::new();
        for entry in WalkDir::new(root).sort_by_file_name().into_iter().filter_map(|e| e.ok()) {
            let path = entry.path();
            if !entry.file_type().is_file() || path.extension().is_none_or(|x| x != "csv") {
                continue;
            }
            let Ok(rel) = path.strip_prefix(root) else { continue };
            let id = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
            match read_header(path) {
                Ok(headings) => {
                    entries.insert(id.clone(), TableEntry { id, headings });
                }
                Err(e) => log::warn!("skipping {}: {e}", path.display()),
            }
        }
        Catalog { root: root.to_path_buf(), entries }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn get(&self, id: &str) -> Option<&TableEntry> {
        self.entries.get(id)
    }

    /// Absolute path of a catalogued table.
    pub fn path(&self, id: &str) -> Option<PathBuf> {
        self.entries.contains_key(id).then(|| self.root.join(id))
    }

    pub fn entries(&self) -> impl Iterator<Item = &TableEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
