//! Question annotation: phrases to knowledge-base entities and intent words,
//! with exact, stemmed, partial and spell-corrected matching.

mod headword;
mod lexicon;
mod tokenize;

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

pub use headword::{detect_headword, is_plural, Headword, QUESTION_WORDS};
pub use lexicon::{Intent, Lexicon};
pub use tokenize::{tokenize, Token};

use crate::error::Result;
use crate::table::{ColumnId, KbRef, KnowledgeBase};
use crate::text::{normalize, parse_number_token};

/// Longest phrase (in tokens) considered for entity matching.
const MAX_SPAN: usize = 8;
/// Partial matches kept per span.
const MAX_PARTIAL_KEYS: usize = 8;
const MAX_SPELL_COMBINATIONS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchKind {
    Exact,
    Stem,
    /// The phrase matches a contiguous part of a longer table string.
    Partial,
    SpellCorrected,
    Placeholder,
}

impl MatchKind {
    pub fn is_approximate(self) -> bool {
        matches!(self, MatchKind::Stem | MatchKind::Partial | MatchKind::SpellCorrected)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AnnotationTarget {
    Column { column: ColumnId },
    Cell { column: ColumnId, value: String, rows: Vec<usize> },
    Intent { intent: Intent },
    Number { value: f64 },
    Placeholder,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Annotation {
    /// First token index.
    pub start: usize,
    /// Length in tokens.
    pub len: usize,
    pub target: AnnotationTarget,
    pub kind: MatchKind,
    /// The lexicon phrase or knowledge-base key that was matched.
    pub key: String,
    pub provenance: String,
}

impl Annotation {
    pub fn covers(&self, token: usize) -> bool {
        token >= self.start && token < self.start + self.len
    }

    pub fn end(&self) -> usize {
        self.start + self.len
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AnnotatedQuery {
    pub question: String,
    pub tokens: Vec<Token>,
    pub annotations: Vec<Annotation>,
    pub headword: Option<(usize, usize)>,
    pub headword_plural: bool,
    /// Token indices of non-stopword tokens no annotation covers.
    pub unmatched: Vec<usize>,
}

impl AnnotatedQuery {
    pub fn unmatched_terms(&self) -> Vec<String> {
        self.unmatched.iter().map(|&i| self.tokens[i].text.clone()).collect()
    }

    pub fn span_text(&self, start: usize, len: usize) -> String {
        self.tokens[start..start + len].iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(" ")
    }

    pub fn is_covered(&self, token: usize) -> bool {
        self.annotations.iter().any(|a| a.covers(token))
    }
}

/// Edit-distance caps for spell correction.
#[derive(Clone, Copy, Debug)]
pub struct SpellConfig {
    pub max_distance: usize,
    pub max_distance_long: usize,
    pub long_word: usize,
    pub min_word: usize,
}

impl Default for SpellConfig {
    fn default() -> Self {
        SpellConfig { max_distance: 1, max_distance_long: 2, long_word: 8, min_word: 4 }
    }
}

impl SpellConfig {
    pub fn cap(&self, word: &str) -> usize {
        if word.chars().count() >= self.long_word {
            self.max_distance_long
        } else {
            self.max_distance
        }
    }
}

pub fn annotate(question: &str, kb: &KnowledgeBase, lexicon: &Lexicon) -> Result<AnnotatedQuery> {
    annotate_with(question, kb, lexicon, SpellConfig::default())
}

pub fn annotate_with(
    question: &str,
    kb: &KnowledgeBase,
    lexicon: &Lexicon,
    spell: SpellConfig,
) -> Result<AnnotatedQuery> {
    let tokens = tokenize(question)?;
    let matcher = Matcher { tokens: &tokens, kb, lexicon, spell, neighbors: RefCell::new(HashMap::new()) };
    let max_n = (kb.max_phrase_words() + 2).max(lexicon.max_phrase_words()).clamp(1, MAX_SPAN);

    // Longest match at every start position; matches contained in an earlier
    // span add nothing and are dropped. Overlaps are left to the parser.
    let mut annotations = Vec::new();
    let mut reach = 0;
    for i in 0..tokens.len() {
        let longest = (1..=max_n.min(tokens.len() - i))
            .rev()
            .map(|len| (len, matcher.match_span(i, len)))
            .find(|(_, found)| !found.is_empty());
        if let Some((len, found)) = longest {
            if i + len > reach {
                annotations.extend(found);
                reach = i + len;
            }
        }
    }

    let headword = detect_headword(&tokens, &annotations, lexicon);
    if let Some(h) = headword {
        let resolved = annotations.iter().any(|a| {
            a.start <= h.start && a.end() > h.start && matches!(a.kind, MatchKind::Exact | MatchKind::Stem)
        });
        if !resolved {
            annotations.push(Annotation {
                start: h.start,
                len: h.len,
                target: AnnotationTarget::Placeholder,
                kind: MatchKind::Placeholder,
                key: matcher.phrase(h.start, h.len),
                provenance: "headword placeholder".into(),
            });
        }
    }
    annotations.sort_by_key(|a| (a.start, a.len));

    let unmatched = tokens
        .iter()
        .filter(|t| !lexicon.is_stopword(&t.text) && !annotations.iter().any(|a| a.covers(t.index)))
        .map(|t| t.index)
        .collect();

    Ok(AnnotatedQuery {
        question: question.to_string(),
        tokens,
        annotations,
        headword: headword.map(|h| (h.start, h.len)),
        headword_plural: headword.is_some_and(|h| h.plural),
        unmatched,
    })
}

struct Matcher<'a> {
    tokens: &'a [Token],
    kb: &'a KnowledgeBase,
    lexicon: &'a Lexicon,
    spell: SpellConfig,
    neighbors: RefCell<HashMap<String, Vec<&'a str>>>,
}

impl<'a> Matcher<'a> {
    fn phrase(&self, start: usize, len: usize) -> String {
        self.tokens[start..start + len].iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(" ")
    }

    fn match_span(&self, start: usize, len: usize) -> Vec<Annotation> {
        let toks = &self.tokens[start..start + len];
        let phrase = self.phrase(start, len);
        let mut out = Vec::new();

        for &intent in self.lexicon.intents(&phrase) {
            out.push(Annotation {
                start,
                len,
                target: AnnotationTarget::Intent { intent },
                kind: MatchKind::Exact,
                key: phrase.clone(),
                provenance: format!("exact syntactic match: intent word \"{phrase}\""),
            });
        }
        if len == 1 {
            if let Some(value) = parse_number_token(&toks[0].text) {
                out.push(Annotation {
                    start,
                    len,
                    target: AnnotationTarget::Number { value },
                    kind: MatchKind::Exact,
                    key: phrase.clone(),
                    provenance: "exact syntactic match: number".into(),
                });
            }
        }

        if self.lexicon.is_stopword(&toks[0].text) || self.lexicon.is_stopword(&toks[len - 1].text) {
            return out;
        }
        let texts: Vec<&str> = toks.iter().map(|t| t.text.as_str()).collect();
        let mut entity = self.match_entity(&texts, start, len);
        if entity.is_empty() {
            entity = self.match_misspelled(&texts, start, len);
        }
        out.extend(entity);
        out
    }

    fn content_stems(&self, words: &[&str]) -> Vec<String> {
        words
            .iter()
            .filter(|w| !self.lexicon.is_stopword(w))
            .map(|w| crate::text::stem(w))
            .collect()
    }

    fn key_content_stems(&self, key: &str) -> Vec<String> {
        let Some(e) = self.kb.entry(key) else { return Vec::new() };
        e.words
            .iter()
            .zip(&e.stems)
            .filter(|(w, _)| !self.lexicon.is_stopword(w))
            .map(|(_, s)| s.clone())
            .collect()
    }

    /// Exact, then stem-level, then partial entity matches for a phrase.
    fn match_entity(&self, words: &[&str], start: usize, len: usize) -> Vec<Annotation> {
        let key = normalize(&words.join(" "));
        if !self.kb.lookup(&key).is_empty() {
            return self.entity_annotations(&key, start, len, MatchKind::Exact);
        }
        let content = self.content_stems(words);
        if content.is_empty() {
            return Vec::new();
        }
        let candidates = self.kb.keys_with_stem(&content[0]);

        let stem_hits: Vec<&String> = candidates.iter().filter(|k| self.key_content_stems(k) == content).collect();
        if !stem_hits.is_empty() {
            return stem_hits
                .into_iter()
                .flat_map(|k| self.entity_annotations(k, start, len, MatchKind::Stem))
                .collect();
        }

        let single = words.len() == 1;
        if single && (words[0].chars().count() < 3 || parse_number_token(words[0]).is_some()) {
            return Vec::new();
        }
        if single && !self.lexicon.intents(words[0]).is_empty() {
            return Vec::new();
        }
        let mut partial: Vec<(usize, &String)> = candidates
            .iter()
            .filter_map(|k| {
                let kc = self.key_content_stems(k);
                (kc.len() > content.len() && kc.windows(content.len()).any(|w| w == content.as_slice()))
                    .then(|| (kc.len() - content.len(), k))
            })
            .collect();
        partial.sort();
        partial
            .into_iter()
            .take(MAX_PARTIAL_KEYS)
            .flat_map(|(_, k)| self.entity_annotations(k, start, len, MatchKind::Partial))
            .collect()
    }

    /// Table words within the edit-distance cap of `w`, nearest and most
    /// frequent first. A word of the table vocabulary ranks itself first.
    fn spelling_neighbors(&self, w: &str) -> Vec<&'a str> {
        if let Some(n) = self.neighbors.borrow().get(w) {
            return n.clone();
        }
        let cap = self.spell.cap(w);
        let mut ranked: Vec<(usize, usize, &'a str)> = self
            .kb
            .vocabulary()
            .iter()
            .filter(|(v, _)| v.chars().count().abs_diff(w.chars().count()) <= cap)
            .map(|(v, f)| (strsim::levenshtein(w, v), *f, v.as_str()))
            .filter(|(d, _, _)| *d <= cap)
            .collect();
        ranked.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)).then(a.2.cmp(b.2)));
        let out: Vec<&'a str> = ranked.into_iter().map(|(_, _, v)| v).collect();
        self.neighbors.borrow_mut().insert(w.to_string(), out.clone());
        out
    }

    /// Spell-correct words against the table vocabulary and retry entity
    /// matching. Alternatives are tried best-first. Words already in the
    /// vocabulary also get alternatives, so a growing table never loses a
    /// correction.
    fn match_misspelled(&self, words: &[&str], start: usize, len: usize) -> Vec<Annotation> {
        let vocab = self.kb.vocabulary();
        let mut options: Vec<Vec<&str>> = Vec::with_capacity(words.len());
        let mut any_corrected = false;
        for &w in words {
            if self.lexicon.is_stopword(w)
                || parse_number_token(w).is_some()
                || !self.lexicon.intents(w).is_empty()
                || QUESTION_WORDS.contains(&w)
            {
                options.push(vec![w]);
                continue;
            }
            let known = vocab.contains_key(w);
            if w.chars().count() < self.spell.min_word {
                if known {
                    options.push(vec![w]);
                    continue;
                }
                return Vec::new();
            }
            let ranked = self.spelling_neighbors(w);
            if ranked.is_empty() {
                return Vec::new();
            }
            any_corrected |= ranked.len() > 1 || ranked[0] != w;
            options.push(ranked);
        }
        if !any_corrected {
            return Vec::new();
        }
        for choice in combinations(&options, MAX_SPELL_COMBINATIONS) {
            if choice == words {
                continue;
            }
            let found = self.match_entity(&choice, start, len);
            if found.is_empty() {
                continue;
            }
            let note = words
                .iter()
                .zip(&choice)
                .filter(|(w, c)| w != c)
                .map(|(w, c)| format!("{w}→{c}"))
                .collect::<Vec<_>>()
                .join(", ");
            return found
                .into_iter()
                .map(|mut a| {
                    a.kind = MatchKind::SpellCorrected;
                    a.provenance = format!("approximate syntactic match: spelling {note}, \"{}\"", a.key);
                    a
                })
                .collect();
        }
        Vec::new()
    }

    fn entity_annotations(
        &self,
        key: &str,
        start: usize,
        len: usize,
        kind: MatchKind,
    ) -> Vec<Annotation> {
        let label = match kind {
            MatchKind::Exact => "exact syntactic match",
            _ => "approximate syntactic match",
        };
        let mut cells: BTreeMap<ColumnId, Vec<usize>> = BTreeMap::new();
        let mut out = Vec::new();
        for r in self.kb.lookup(key) {
            match r {
                KbRef::ColumnHeading { column } => out.push(Annotation {
                    start,
                    len,
                    target: AnnotationTarget::Column { column: column.clone() },
                    kind,
                    key: key.to_string(),
                    provenance: format!("{label}: column heading \"{key}\""),
                }),
                KbRef::Cell { column, row } => cells.entry(column.clone()).or_default().push(*row),
            }
        }
        for (column, rows) in cells {
            out.push(Annotation {
                start,
                len,
                provenance: format!("{label}: cell \"{key}\" in {column}"),
                target: AnnotationTarget::Cell { column, value: key.to_string(), rows },
                kind,
                key: key.to_string(),
            });
        }
        out
    }
}

/// Cartesian product of per-word alternatives, best-first in lexicographic
/// order, truncated to `limit`.
fn combinations<'a>(options: &[Vec<&'a str>], limit: usize) -> Vec<Vec<&'a str>> {
    let mut out: Vec<Vec<&str>> = vec![Vec::new()];
    for opts in options {
        let mut next = Vec::new();
        'outer: for prefix in &out {
            for o in opts {
                if next.len() >= limit {
                    break 'outer;
                }
                let mut p = prefix.clone();
                p.push(*o);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests;
