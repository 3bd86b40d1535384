//! Rule-based question typing, operand requirements per type, and detection
//! of the operands a candidate parse still lacks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::annotate::{AnnotatedQuery, Intent};
use crate::grammar::{Aggregation, AnswerKind, Filter, SemanticParse};

/// First words of yes/no questions.
const YES_NO_OPENERS: [&str; 17] = [
    "is", "are", "was", "were", "did", "does", "do", "has", "have", "had", "can", "could", "will", "would", "should",
    "isn't", "wasn't",
];
/// Question words that ask for an entity rather than a quantity.
const ENTITY_WORDS: [&str; 4] = ["who", "whom", "where", "whose"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum QuestionType {
    SortDim,
    SortMet,
    FirstLast,
    BefAfter,
    SameValue,
    PosBoth,
    AOrB,
    Difference,
    HowMany,
    Lookup,
    OtherType,
}

impl QuestionType {
    pub const ALL: [QuestionType; 11] = [
        QuestionType::SortDim,
        QuestionType::SortMet,
        QuestionType::FirstLast,
        QuestionType::BefAfter,
        QuestionType::SameValue,
        QuestionType::PosBoth,
        QuestionType::AOrB,
        QuestionType::Difference,
        QuestionType::HowMany,
        QuestionType::Lookup,
        QuestionType::OtherType,
    ];

    pub fn id(self) -> &'static str {
        match self {
            QuestionType::SortDim => "SORT_DIM",
            QuestionType::SortMet => "SORT_MET",
            QuestionType::FirstLast => "FIRST_LAST",
            QuestionType::BefAfter => "BEF_AFTER",
            QuestionType::SameValue => "SAME_VALUE",
            QuestionType::PosBoth => "POS_BOTH",
            QuestionType::AOrB => "A_OR_B",
            QuestionType::Difference => "DIFFERENCE",
            QuestionType::HowMany => "HOW_MANY",
            QuestionType::Lookup => "LOOKUP",
            QuestionType::OtherType => "OTHER_TYPE",
        }
    }
}

impl fmt::Display for QuestionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for QuestionType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        QuestionType::ALL.into_iter().find(|t| t.id() == s).ok_or_else(|| format!("unknown question type {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OperandRequirement {
    pub dimensions: usize,
    pub metrics: usize,
    pub filters: usize,
    /// Columns of any kind.
    pub any_columns: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OperandKind {
    Dimension,
    Metric,
    Filter,
    AnyColumn,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MissingSlot {
    pub kind: OperandKind,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MissingOperandReport {
    pub question_type: QuestionType,
    pub missing: Vec<MissingSlot>,
    /// Unmatched and placeholder terms, the input to abduction.
    pub terms: Vec<String>,
}

impl MissingOperandReport {
    pub fn is_complete(&self) -> bool {
        self.missing.is_empty()
    }

    pub fn count(&self, kind: OperandKind) -> usize {
        self.missing.iter().filter(|m| m.kind == kind).map(|m| m.count).sum()
    }
}

pub fn is_yes_no(aq: &AnnotatedQuery) -> bool {
    aq.tokens.first().is_some_and(|t| YES_NO_OPENERS.contains(&t.text.as_str()))
}

/// Classify a candidate. Triggers are checked in a fixed priority order.
/// Only intents and filters decide the type; identified columns do not,
/// except that a sorted headword metric marks SORT_MET.
pub fn classify(aq: &AnnotatedQuery, parse: &SemanticParse) -> QuestionType {
    let equality_filters = parse.filters.iter().filter(|f| f.is_equals()).count();
    if parse.aggregation == Some(Aggregation::Difference) {
        return QuestionType::Difference;
    }
    if parse.has_marker(Intent::Or) && equality_filters >= 2 {
        return QuestionType::AOrB;
    }
    if is_yes_no(aq) {
        return QuestionType::OtherType;
    }
    if parse.has_marker(Intent::Both) {
        return QuestionType::PosBoth;
    }
    if parse.has_marker(Intent::Same) {
        return QuestionType::SameValue;
    }
    if parse.filters.iter().any(|f| matches!(f, Filter::Position { .. })) {
        return QuestionType::BefAfter;
    }
    if parse.ordinal.is_some() {
        return QuestionType::FirstLast;
    }
    if parse.sort.is_some() || parse.limit.is_some() {
        let headword_metric = parse.metrics.iter().any(|m| m.headword);
        let other_metrics = parse.metrics.iter().filter(|m| !m.headword).count();
        let wants_entity = aq.headword.is_some() || has_word(aq, &ENTITY_WORDS);
        return if (headword_metric && other_metrics == 0) || !wants_entity {
            QuestionType::SortMet
        } else {
            QuestionType::SortDim
        };
    }
    if parse.aggregation.is_some() {
        return QuestionType::HowMany;
    }
    let asks = parse.has_marker(Intent::Lookup)
        || parse.placeholder.is_some()
        || has_word(aq, &crate::annotate::QUESTION_WORDS);
    if asks || !parse.filters.is_empty() {
        return QuestionType::Lookup;
    }
    QuestionType::OtherType
}

fn has_word(aq: &AnnotatedQuery, words: &[&str]) -> bool {
    aq.tokens.iter().any(|t| words.contains(&t.text.as_str()))
}

pub fn required_operands(t: QuestionType) -> OperandRequirement {
    let req = |dimensions, metrics, filters| OperandRequirement { dimensions, metrics, filters, any_columns: 0 };
    match t {
        QuestionType::SortDim => req(1, 1, 0),
        QuestionType::SortMet => req(0, 1, 0),
        QuestionType::FirstLast => req(1, 0, 0),
        QuestionType::BefAfter => req(0, 0, 1),
        QuestionType::SameValue => req(2, 0, 1),
        QuestionType::PosBoth => req(1, 0, 2),
        QuestionType::AOrB => req(0, 0, 2),
        QuestionType::Difference => req(0, 1, 2),
        QuestionType::HowMany => req(0, 1, 0),
        QuestionType::Lookup => req(1, 0, 1),
        QuestionType::OtherType => OperandRequirement { any_columns: 1, ..req(0, 0, 0) },
    }
}

pub fn answer_kind(t: QuestionType, aq: &AnnotatedQuery) -> AnswerKind {
    match t {
        QuestionType::HowMany | QuestionType::Difference | QuestionType::SortMet => AnswerKind::Number,
        QuestionType::Lookup | QuestionType::SameValue if aq.headword_plural => AnswerKind::List,
        QuestionType::OtherType if is_yes_no(aq) => AnswerKind::Boolean,
        _ => AnswerKind::Cell,
    }
}

pub fn find_missing(aq: &AnnotatedQuery, parse: &SemanticParse, t: QuestionType) -> MissingOperandReport {
    let req = required_operands(t);
    let mut missing = Vec::new();
    let mut need = |kind, required: usize, have: usize| {
        if required > have {
            missing.push(MissingSlot { kind, count: required - have });
        }
    };
    need(OperandKind::Dimension, req.dimensions, parse.dimensions.len());
    need(OperandKind::Metric, req.metrics, parse.metrics.len());
    need(OperandKind::Filter, req.filters, parse.filters.len());
    need(OperandKind::AnyColumn, req.any_columns, parse.columns().len());
    MissingOperandReport { question_type: t, missing, terms: abduction_terms(aq, parse) }
}

/// Unmatched terms followed by the placeholder's words.
pub fn abduction_terms(aq: &AnnotatedQuery, parse: &SemanticParse) -> Vec<String> {
    let mut terms = aq.unmatched_terms();
    if let Some(a) = parse.placeholder.and_then(|i| aq.annotations.get(i)) {
        terms.extend(aq.tokens[a.start..a.end()].iter().map(|t| t.text.clone()));
    }
    terms
}
