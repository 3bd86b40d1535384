use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DEFAULT_INTENTS: &str = include_str!("../../data/intents.txt");
const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords.txt");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Intent {
    Lookup,
    HowMany,
    Difference,
    SortDesc,
    SortAsc,
    First,
    Last,
    Before,
    After,
    Same,
    Both,
    Or,
    Sum,
    Average,
    CmpGt,
    CmpLt,
    CmpGe,
    CmpLe,
    CmpEq,
    CmpNe,
    Top,
}

impl Intent {
    pub const ALL: [Intent; 21] = [
        Intent::Lookup,
        Intent::HowMany,
        Intent::Difference,
        Intent::SortDesc,
        Intent::SortAsc,
        Intent::First,
        Intent::Last,
        Intent::Before,
        Intent::After,
        Intent::Same,
        Intent::Both,
        Intent::Or,
        Intent::Sum,
        Intent::Average,
        Intent::CmpGt,
        Intent::CmpLt,
        Intent::CmpGe,
        Intent::CmpLe,
        Intent::CmpEq,
        Intent::CmpNe,
        Intent::Top,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Intent::Lookup => "LOOKUP",
            Intent::HowMany => "HOW_MANY",
            Intent::Difference => "DIFFERENCE",
            Intent::SortDesc => "SORT_DESC",
            Intent::SortAsc => "SORT_ASC",
            Intent::First => "FIRST",
            Intent::Last => "LAST",
            Intent::Before => "BEFORE",
            Intent::After => "AFTER",
            Intent::Same => "SAME",
            Intent::Both => "BOTH",
            Intent::Or => "OR",
            Intent::Sum => "SUM",
            Intent::Average => "AVERAGE",
            Intent::CmpGt => "CMP_GT",
            Intent::CmpLt => "CMP_LT",
            Intent::CmpGe => "CMP_GE",
            Intent::CmpLe => "CMP_LE",
            Intent::CmpEq => "CMP_EQ",
            Intent::CmpNe => "CMP_NE",
            Intent::Top => "TOP",
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            Intent::CmpGt | Intent::CmpLt | Intent::CmpGe | Intent::CmpLe | Intent::CmpEq | Intent::CmpNe
        )
    }
}

impl fmt::Display for Intent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Intent {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Intent::ALL
            .iter()
            .copied()
            .find(|i| i.id() == s)
            .ok_or_else(|| format!("unknown intent {s:?}"))
    }
}

/// Intent phrases and stopwords.
#[derive(Clone, Debug)]
pub struct Lexicon {
    phrases: HashMap<String, Vec<Intent>>,
    max_words: usize,
    stopwords: HashSet<String>,
}

impl Lexicon {
    pub fn from_config(intents: &str, stopwords: &str) -> Result<Self> {
        let mut phrases: HashMap<String, Vec<Intent>> = HashMap::new();
        let mut max_words = 0;
        for (i, raw) in intents.lines().enumerate() {
            let line = raw.trim_end();
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let err = |reason: String| Error::Config { name: "intents".into(), line: i + 1, reason };
            let (phrase, id) = line.split_once('\t').ok_or_else(|| err("expected phrase<TAB>intent".into()))?;
            let intent: Intent = id.trim().parse().map_err(err)?;
            let phrase = phrase.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
            max_words = max_words.max(phrase.split(' ').count());
            let slot = phrases.entry(phrase).or_default();
            if !slot.contains(&intent) {
                slot.push(intent);
            }
        }
        let stopwords = stopwords
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Ok(Lexicon { phrases, max_words, stopwords })
    }

    pub fn default_lexicon() -> &'static Lexicon {
        static L: OnceLock<Lexicon> = OnceLock::new();
        L.get_or_init(|| Lexicon::from_config(DEFAULT_INTENTS, DEFAULT_STOPWORDS).expect("bundled lexicon"))
    }

    pub fn intents(&self, phrase: &str) -> &[Intent] {
        self.phrases.get(phrase).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn max_phrase_words(&self) -> usize {
        self.max_words
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        self.stopwords.contains(word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_lexicon_loads() {
        let l = Lexicon::default_lexicon();
        assert_eq!(l.intents("how many"), &[Intent::HowMany]);
        assert_eq!(l.intents("more than"), &[Intent::CmpGt]);
        assert_eq!(l.intents("top"), &[Intent::SortDesc, Intent::Top]);
        assert!(l.is_stopword("the"));
        assert!(!l.is_stopword("who"));
        assert_eq!(l.max_phrase_words(), 3);
    }

    #[test]
    fn bad_lines_are_rejected() {
        assert!(Lexicon::from_config("most SORT_DESC", "").is_err());
        assert!(Lexicon::from_config("most\tNOPE", "").is_err());
    }

    #[test]
    fn ids_round_trip() {
        for i in Intent::ALL {
            assert_eq!(i.id().parse::<Intent>().unwrap(), i);
        }
    }
}
