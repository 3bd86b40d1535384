//! The per-table knowledge base: normalized surface strings to typed table
//! entities.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::comprehend::{ColumnId, ComprehendedTable};
use crate::text::{normalize, stem, words};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KbRef {
    ColumnHeading { column: ColumnId },
    Cell { column: ColumnId, row: usize },
}

/// One indexed surface string.
#[derive(Clone, Debug, Serialize)]
pub struct KbEntry {
    pub key: String,
    pub words: Vec<String>,
    pub stems: Vec<String>,
    pub refs: Vec<KbRef>,
}

#[derive(Clone, Debug, Default)]
pub struct KnowledgeBase {
    entries: BTreeMap<String, KbEntry>,
    /// Stem of any word → keys containing it.
    stem_index: HashMap<String, Vec<String>>,
    /// Word → number of entries using it, the vocabulary for spell correction.
    word_freq: HashMap<String, usize>,
    max_words: usize,
}

impl KnowledgeBase {
    pub fn lookup(&self, key: &str) -> &[KbRef] {
        self.entries.get(key).map(|e| e.refs.as_slice()).unwrap_or(&[])
    }

    pub fn entry(&self, key: &str) -> Option<&KbEntry> {
        self.entries.get(key)
    }

    pub fn entries(&self) -> impl Iterator<Item = &KbEntry> {
        self.entries.values()
    }

    /// Keys whose words include one stemming to `s`.
    pub fn keys_with_stem(&self, s: &str) -> &[String] {
        self.stem_index.get(s).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn vocabulary(&self) -> &HashMap<String, usize> {
        &self.word_freq
    }

    pub fn max_phrase_words(&self) -> usize {
        self.max_words
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn insert(&mut self, surface: &str, r: KbRef) {
        let key = normalize(surface);
        if key.is_empty() {
            return;
        }
        let entry = self.entries.entry(key.clone()).or_insert_with(|| {
            let ws = words(&key);
            KbEntry { key: key.clone(), stems: ws.iter().map(|w| stem(w)).collect(), words: ws, refs: Vec::new() }
        });
        if !entry.refs.contains(&r) {
            entry.refs.push(r);
        }
    }

    fn finish(&mut self) {
        for e in self.entries.values() {
            self.max_words = self.max_words.max(e.words.len());
            let mut seen = Vec::new();
            for (w, s) in e.words.iter().zip(&e.stems) {
                if seen.contains(&s) {
                    continue;
                }
                seen.push(s);
                self.stem_index.entry(s.clone()).or_default().push(e.key.clone());
                *self.word_freq.entry(w.clone()).or_default() += 1;
            }
        }
    }
}

/// Index every heading and every distinct dimension cell string.
pub fn build_knowledge_base(table: &ComprehendedTable) -> KnowledgeBase {
    let mut kb = KnowledgeBase::default();
    for col in &table.columns {
        if col.id.is_row_id() || !(col.is_dimension() || col.is_metric()) {
            continue;
        }
        kb.insert(&col.name, KbRef::ColumnHeading { column: col.id.clone() });
        if col.is_dimension() {
            for (row, v) in col.values.iter().enumerate() {
                if !v.is_empty() {
                    kb.insert(&v.render(), KbRef::Cell { column: col.id.clone(), row });
                }
            }
        }
    }
    kb.finish();
    kb
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::{comprehend, RawTable};

    fn table() -> ComprehendedTable {
        comprehend(&RawTable::new(
            "actor",
            vec!["Year".into(), "Title".into(), "Notes".into()],
            vec![
                vec!["1995".into(), "Lost and Delirious".into(), "".into()],
                vec!["1999".into(), "Notes".into(), "also producer".into()],
                vec!["2001".into(), "Octane".into(), "also producer".into()],
            ],
        ))
    }

    #[test]
    fn headings_are_indexed() {
        let kb = build_knowledge_base(&table());
        assert_eq!(kb.lookup("title"), &[KbRef::ColumnHeading { column: ColumnId::new("c1") }]);
        // Numeric heading maps to both twins.
        assert_eq!(kb.lookup("year").len(), 2);
    }

    #[test]
    fn cells_are_indexed_with_every_row() {
        let kb = build_knowledge_base(&table());
        assert_eq!(
            kb.lookup("also producer"),
            &[
                KbRef::Cell { column: ColumnId::new("c2"), row: 1 },
                KbRef::Cell { column: ColumnId::new("c2"), row: 2 }
            ]
        );
    }

    #[test]
    fn heading_and_cell_share_an_entry() {
        let kb = build_knowledge_base(&table());
        let refs = kb.lookup("notes");
        assert_eq!(refs.len(), 2);
        assert!(refs.contains(&KbRef::ColumnHeading { column: ColumnId::new("c2") }));
        assert!(refs.contains(&KbRef::Cell { column: ColumnId::new("c1"), row: 1 }));
    }

    #[test]
    fn stem_index_and_vocabulary() {
        let kb = build_knowledge_base(&table());
        assert!(kb.keys_with_stem(&stem("producers")).contains(&"also producer".to_string()));
        assert_eq!(kb.vocabulary().get("producer"), Some(&1));
        assert_eq!(kb.max_phrase_words(), 3);
    }
}
