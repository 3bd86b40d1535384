use std::fs::File;
use std::io::Read;
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A table as read from disk: header plus a rectangular grid of cell text.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawTable {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl RawTable {
    /// Build from in-memory rows, applying the same header and ragged-row
    /// policy as the file loaders.
    pub fn new(name: impl Into<String>, header: Vec<String>, rows: Vec<Vec<String>>) -> Self {
        let name = name.into();
        let header = fix_header(header);
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(i, r)| fit_row(&name, i, r, header.len()))
            .collect();
        RawTable { name, header, rows }
    }

    pub fn arity(&self) -> usize {
        self.header.len()
    }
}

/// How quotes are escaped inside quoted fields.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CsvDialect {
    /// Doubled quotes (`""`).
    #[default]
    Rfc4180,
    /// Backslash escapes (`\"`, `\\`) as used by the dataset's table dumps.
    Backslash,
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<RawTable> {
    load_csv_with(path, CsvDialect::Rfc4180)
}

pub fn load_csv_with(path: impl AsRef<Path>, dialect: CsvDialect) -> Result<RawTable> {
    let path = path.as_ref();
    let load_err = |reason: String| Error::TableLoad { path: path.to_path_buf(), reason };
    let mut data = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut data))
        .map_err(|e| load_err(e.to_string()))?;
    if data.iter().all(u8::is_ascii_whitespace) {
        return Err(load_err("empty file".into()));
    }
    let mut builder = csv::ReaderBuilder::new();
    builder.has_headers(false).flexible(true);
    if dialect == CsvDialect::Backslash {
        builder.escape(Some(b'\\')).double_quote(false);
    }
    let mut reader = builder.from_reader(data.as_slice());
    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| load_err(e.to_string()))?;
        records.push(rec.iter().map(str::to_string).collect());
    }
    finish(path, records)
}

/// Load the dataset's tab-separated page dump (`\n`, `\p` for `|`, `\\`).
pub fn load_tsv(path: impl AsRef<Path>) -> Result<RawTable> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::TableLoad {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let records = text
        .lines()
        .filter(|l| !l.is_empty())
        .map(|l| l.split('\t').map(unescape_tsv).collect())
        .collect();
    finish(path, records)
}

pub(crate) fn unescape_tsv(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some('p') => out.push('|'),
            Some('\\') => out.push('\\'),
            Some(other) => {
                out.push('\\');
                out.push(other);
            }
            None => out.push('\\'),
        }
    }
    out
}

fn finish(path: &Path, mut records: Vec<Vec<String>>) -> Result<RawTable> {
    if records.is_empty() {
        return Err(Error::TableLoad { path: path.to_path_buf(), reason: "empty file".into() });
    }
    let header = records.remove(0);
    if records.is_empty() {
        return Err(Error::TableLoad { path: path.to_path_buf(), reason: "zero-row table".into() });
    }
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(RawTable::new(name, header, records))
}

fn fix_header(header: Vec<String>) -> Vec<String> {
    header
        .into_iter()
        .enumerate()
        .map(|(k, h)| {
            let h = h.split_whitespace().collect::<Vec<_>>().join(" ");
            if h.is_empty() {
                format!("col{k}")
            } else {
                h
            }
        })
        .collect()
}

fn fit_row(table: &str, index: usize, mut row: Vec<String>, arity: usize) -> Vec<String> {
    if row.len() != arity {
        warn!("table {table}: row {index} has {} cells, header has {arity}", row.len());
        row.resize(arity, String::new());
    }
    row
}

#[cfg(test)]
mod tests {
    use std::io::Write;

    use super::*;

    fn write_tmp(content: &str, ext: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(ext).tempfile().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_rectangular_csv() {
        let f = write_tmp("a,b,c\n1,2,3\n4,5,6\n7,8,9\n10,11,12\n13,14,15\n", ".csv");
        let t = load_csv(f.path()).unwrap();
        assert_eq!(t.arity(), 3);
        assert_eq!(t.rows.len(), 5);
    }

    #[test]
    fn pads_short_rows_and_truncates_long_ones() {
        let f = write_tmp("a,b,c\n1,2\n1,2,3,4\n", ".csv");
        let t = load_csv(f.path()).unwrap();
        assert_eq!(t.rows[0], vec!["1", "2", ""]);
        assert_eq!(t.rows[1], vec!["1", "2", "3"]);
    }

    #[test]
    fn empty_file_is_an_error() {
        let f = write_tmp("", ".csv");
        let err = load_csv(f.path()).unwrap_err();
        assert!(err.to_string().contains(&f.path().display().to_string()));
        let f = write_tmp("a,b\n", ".csv");
        assert!(load_csv(f.path()).is_err());
        assert!(load_csv("/nonexistent/table.csv").is_err());
    }

    #[test]
    fn empty_header_names_get_placeholders() {
        let f = write_tmp(",Name,\nx,y,z\n", ".csv");
        let t = load_csv(f.path()).unwrap();
        assert_eq!(t.header, vec!["col0", "Name", "col2"]);
    }

    #[test]
    fn rfc_quoting() {
        let f = write_tmp("a,b\n\"x, \"\"y\"\"\",\"line\nbreak\"\n", ".csv");
        let t = load_csv(f.path()).unwrap();
        assert_eq!(t.rows[0], vec!["x, \"y\"", "line\nbreak"]);
    }

    #[test]
    fn backslash_dialect() {
        let f = write_tmp("\"a\",\"b\"\n\"say \\\"hi\\\"\",\"back\\\\slash\"\n", ".csv");
        let t = load_csv_with(f.path(), CsvDialect::Backslash).unwrap();
        assert_eq!(t.rows[0], vec!["say \"hi\"", "back\\slash"]);
    }

    #[test]
    fn tsv_unescapes() {
        let f = write_tmp("a\tb\nx\\ny\tp\\pq\n", ".tsv");
        let t = load_tsv(f.path()).unwrap();
        assert_eq!(t.rows[0], vec!["x\ny", "p|q"]);
    }
}
