//! Corpus statistics: which query terms co-occur with which column
//! headings, and how many questions expect a yes/no answer.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::EvalExample;
use crate::annotate::tokenize;
use crate::error::{Error, Result};
use crate::text::normalize;

/// Per-table term and heading sets.
#[derive(Clone, Debug, Default)]
pub struct AssociationCensus {
    tables: Vec<(HashSet<String>, HashSet<String>)>,
}

/// Header row of a dataset table file.
pub fn read_header(path: &Path) -> Result<Vec<String>> {
    let err = |reason: String| Error::TableLoad { path: path.to_path_buf(), reason };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .escape(Some(b'\\'))
        .double_quote(false)
        .from_path(path)
        .map_err(|e| err(e.to_string()))?;
    let mut rec = csv::StringRecord::new();
    if !reader.read_record(&mut rec).map_err(|e| err(e.to_string()))? {
        return Err(err("empty file".into()));
    }
    Ok(rec.iter().map(str::to_string).collect())
}

/// Build the census over the examples' tables, read from `root`.
pub fn association_census(examples: &[EvalExample], root: &Path) -> Result<AssociationCensus> {
    let mut by_table: BTreeMap<&str, HashSet<String>> = BTreeMap::new();
    for ex in examples {
        let terms = by_table.entry(ex.table.as_str()).or_default();
        if let Ok(tokens) = tokenize(&ex.question) {
            terms.extend(tokens.into_iter().map(|t| t.text));
        }
    }
    let entries: Vec<(&str, HashSet<String>)> = by_table.into_iter().collect();
    let tables = entries
        .into_par_iter()
        .map(|(table, terms)| {
            let headings = read_header(&root.join(table))?.iter().map(|h| normalize(h)).collect();
            Ok((terms, headings))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AssociationCensus { tables })
}

impl AssociationCensus {
    pub fn from_tables(tables: Vec<(HashSet<String>, HashSet<String>)>) -> Self {
        AssociationCensus { tables }
    }

    pub fn table_count(&self) -> usize {
        self.tables.len()
    }

    /// (tables whose questions use `term`, how many of those have a column
    /// headed `heading`).
    pub fn counts(&self, term: &str, heading: &str) -> (usize, usize) {
        let term = term.to_lowercase();
        let heading = normalize(heading);
        let with_term: Vec<_> = self.tables.iter().filter(|(t, _)| t.contains(&term)).collect();
        let both = with_term.iter().filter(|(_, h)| h.contains(&heading)).count();
        (with_term.len(), both)
    }

    /// The `k` most frequent (term, heading) pairs by table count, ties by
    /// name. Terms for which `skip` holds are left out.
    pub fn top_pairs(&self, k: usize, skip: impl Fn(&str) -> bool) -> Vec<(String, String, usize)> {
        let mut counts: HashMap<(&str, &str), usize> = HashMap::new();
        for (terms, headings) in &self.tables {
            for t in terms.iter().filter(|t| !skip(t)) {
                for h in headings {
                    *counts.entry((t, h)).or_default() += 1;
                }
            }
        }
        let mut pairs: Vec<_> = counts.into_iter().map(|((t, h), n)| (t.to_string(), h.to_string(), n)).collect();
        pairs.sort_by(|a, b| b.2.cmp(&a.2).then_with(|| (&a.0, &a.1).cmp(&(&b.0, &b.1))));
        pairs.truncate(k);
        pairs
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct YesNoCensus {
    pub questions: usize,
    pub yes: usize,
    pub no: usize,
}

impl YesNoCensus {
    pub fn yes_fraction(&self) -> f64 {
        if self.questions == 0 {
            0.0
        } else {
            self.yes as f64 / self.questions as f64
        }
    }
}

/// Questions whose gold answer is exactly "yes" or "no".
pub fn yes_no_census(examples: &[EvalExample]) -> YesNoCensus {
    let mut c = YesNoCensus::default();
    for ex in examples {
        let [g] = ex.gold.as_slice() else { continue };
        match g.trim().to_lowercase().as_str() {
            "yes" => c.yes += 1,
            "no" => c.no += 1,
            _ => continue,
        }
        c.questions += 1;
    }
    c
}
