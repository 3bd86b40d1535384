//! Headword detection: the noun phrase following the question word.

use super::lexicon::Lexicon;
use super::tokenize::Token;
use super::{Annotation, AnnotationTarget};

pub const QUESTION_WORDS: [&str; 8] = ["who", "what", "which", "where", "when", "how", "whom", "whose"];

/// Question words that stand for the answer entity themselves ("who won
/// ..."); no noun phrase follows them.
const PRONOMINAL: [&str; 4] = ["who", "whom", "where", "when"];

const SCAN_WINDOW: usize = 4;

const NOT_PLURAL: [&str; 16] = [
    "series", "species", "news", "status", "always", "perhaps", "across", "bus", "gas", "lens", "physics",
    "mathematics", "athletics", "chess", "campus", "is",
];
const IRREGULAR_PLURALS: [&str; 6] = ["people", "men", "women", "children", "teeth", "feet"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Headword {
    pub start: usize,
    pub len: usize,
    pub plural: bool,
}

pub fn detect_headword(tokens: &[Token], annotations: &[Annotation], lexicon: &Lexicon) -> Option<Headword> {
    let qpos = tokens.iter().position(|t| QUESTION_WORDS.contains(&t.text.as_str()))?;
    let qword = tokens[qpos].text.as_str();
    if PRONOMINAL.contains(&qword) {
        return None;
    }
    let intent_covered = |i: usize| {
        annotations
            .iter()
            .any(|a| matches!(a.target, AnnotationTarget::Intent { .. }) && a.covers(i))
    };
    if qword == "how" && !tokens.get(qpos + 1).is_some_and(|t| t.text == "many" || t.text == "much") {
        return None;
    }
    let end = (qpos + 1 + SCAN_WINDOW).min(tokens.len());
    for i in qpos + 1..end {
        let t = &tokens[i];
        if lexicon.is_stopword(&t.text) || intent_covered(i) || t.text.chars().all(|c| !c.is_alphabetic()) {
            continue;
        }
        // A multi-word entity match starting here is taken whole.
        let len = annotations
            .iter()
            .filter(|a| a.start == i && !matches!(a.target, AnnotationTarget::Intent { .. }))
            .map(|a| a.len)
            .max()
            .unwrap_or(1);
        let last = &tokens[i + len - 1].text;
        return Some(Headword { start: i, len, plural: is_plural(last) });
    }
    None
}

/// Trailing-s heuristic with exceptions.
pub fn is_plural(word: &str) -> bool {
    let w = word.to_lowercase();
    if IRREGULAR_PLURALS.contains(&w.as_str()) {
        return true;
    }
    if NOT_PLURAL.contains(&w.as_str()) || w.len() <= 3 || !w.ends_with('s') {
        return false;
    }
    !(w.ends_with("ss") || w.ends_with("us") || w.ends_with("is") || w.ends_with("'s"))
}
