//! Dataset loading. The published layout keeps questions in `data/*.tsv`
//! (id, utterance, context, targetValue) and tables under `csv/`.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::table::unescape_tsv;

/// File listing the splits of a non-standard dataset directory:
/// `name<TAB>relative path<TAB>expected count or -`.
pub const LAYOUT_FILE: &str = "splits.tsv";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EvalExample {
    pub id: String,
    pub question: String,
    /// Table path relative to the dataset root.
    pub table: String,
    pub gold: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitSpec {
    pub name: String,
    pub file: PathBuf,
    pub expected: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetLayout {
    pub splits: Vec<SplitSpec>,
}

impl DatasetLayout {
    /// Version 1.0.2 of the published dataset.
    pub fn published() -> Self {
        let split = |name: &str, file: &str, n| SplitSpec {
            name: name.into(),
            file: PathBuf::from("data").join(file),
            expected: Some(n),
        };
        DatasetLayout {
            splits: vec![
                split("train", "training.tsv", 14_152),
                split("test", "pristine-unseen-tables.tsv", 4_344),
                split("extra", "pristine-seen-tables.tsv", 3_537),
            ],
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut splits = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: &str| Error::Config { name: LAYOUT_FILE.into(), line: i + 1, reason: reason.into() };
            let f: Vec<&str> = line.split('\t').collect();
            let [name, file, expected] = f.as_slice() else { return Err(err("expected three tab-separated fields")) };
            let expected = match expected.trim() {
                "-" => None,
                n => Some(n.parse().map_err(|_| err("bad expected count"))?),
            };
            splits.push(SplitSpec { name: name.trim().into(), file: PathBuf::from(file.trim()), expected });
        }
        Ok(DatasetLayout { splits })
    }

    /// The layout file in `root` if present, else the published layout.
    pub fn for_root(root: &Path) -> Result<Self> {
        let path = root.join(LAYOUT_FILE);
        if path.is_file() {
            DatasetLayout::parse(&std::fs::read_to_string(path)?)
        } else {
            Ok(DatasetLayout::published())
        }
    }

    pub fn split(&self, name: &str) -> Result<&SplitSpec> {
        self.splits.iter().find(|s| s.name == name).ok_or_else(|| Error::UnknownSplit(name.into()))
    }
}

pub fn load_dataset(root: &Path, split: &str) -> Result<Vec<EvalExample>> {
    load_dataset_with(root, split, &DatasetLayout::for_root(root)?)
}

/// Load one split and check its size and that every table file exists.
pub fn load_dataset_with(root: &Path, split: &str, layout: &DatasetLayout) -> Result<Vec<EvalExample>> {
    let spec = layout.split(split)?;
    let path = root.join(&spec.file);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::Dataset(format!("{}: {e}", path.display())))?;
    let examples = parse_examples(&text).map_err(|e| Error::Dataset(format!("{}: {e}", path.display())))?;
    if let Some(expected) = spec.expected {
        if examples.len() != expected {
            return Err(Error::SplitCount { split: split.into(), expected, found: examples.len() });
        }
    }
    let mut checked = std::collections::HashSet::new();
    for ex in &examples {
        if checked.insert(ex.table.as_str()) && !root.join(&ex.table).is_file() {
            return Err(Error::Dataset(format!("example {}: missing table file {}", ex.id, ex.table)));
        }
    }
    Ok(examples)
}

/// Parse question TSV text with an `id utterance context targetValue` header.
pub fn parse_examples(text: &str) -> std::result::Result<Vec<EvalExample>, String> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or("empty file")?;
    let cols: Vec<&str> = header.split('\t').collect();
    let find = |name: &str| cols.iter().position(|c| c.trim() == name).ok_or(format!("missing column {name}"));
    let (id, utterance, context, target) = (find("id")?, find("utterance")?, find("context")?, find("targetValue")?);
    let mut out = Vec::new();
    for (n, line) in lines {
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        let field = |i: usize| f.get(i).copied().ok_or(format!("line {}: too few fields", n + 1));
        let gold: Vec<String> = field(target)?.split('|').map(unescape_tsv).collect();
        if gold.iter().all(|g| g.trim().is_empty()) {
            return Err(format!("line {}: empty gold answer", n + 1));
        }
        out.push(EvalExample {
            id: field(id)?.to_string(),
            question: unescape_tsv(field(utterance)?),
            table: field(context)?.to_string(),
            gold,
        });
    }
    Ok(out)
}
