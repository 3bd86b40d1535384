//! Query plans with at most one level of nesting, their evaluation over body
//! rows, and answer extraction.

mod plan;
mod run;
mod sql;

use serde::Serialize;

pub use plan::{build_plan, AggregateFn, OrderBy, Output, PositionStep, Predicate, QueryPlan, Stage};
pub use run::execute;
pub use sql::to_sql;

use crate::question_typer::QuestionType;
use crate::table::{ColumnId, TypedValue};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CellRef {
    pub column: ColumnId,
    /// Source row index.
    pub row: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultValue {
    pub value: TypedValue,
    pub cells: Vec<CellRef>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ResultSet {
    pub values: Vec<ResultValue>,
}

impl ResultSet {
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn rendered(&self) -> Vec<String> {
        self.values.iter().map(|v| v.value.render()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum AnswerValue {
    Scalar(TypedValue),
    List(Vec<TypedValue>),
    Boolean(bool),
    None,
}

impl AnswerValue {
    pub fn is_none(&self) -> bool {
        matches!(self, AnswerValue::None)
    }

    /// Answer strings in the form used for comparison with gold answers.
    pub fn strings(&self) -> Vec<String> {
        match self {
            AnswerValue::Scalar(v) => vec![v.render()],
            AnswerValue::List(vs) => vs.iter().map(TypedValue::render).collect(),
            AnswerValue::Boolean(b) => vec![if *b { "yes" } else { "no" }.to_string()],
            AnswerValue::None => Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Answer {
    pub value: AnswerValue,
    /// Cells the answer was read or computed from.
    pub cells: Vec<CellRef>,
}

/// Extract the final answer. A plural headword yields every projected value;
/// otherwise the first in table order. Quantities are scalars.
pub fn normalize_answer(result: &ResultSet, qtype: QuestionType, plural: bool) -> Answer {
    let Some(first) = result.values.first() else {
        return Answer { value: AnswerValue::None, cells: Vec::new() };
    };
    let scalar = matches!(qtype, QuestionType::HowMany | QuestionType::Difference | QuestionType::SortMet);
    let list = !scalar && result.values.len() > 1 && (plural || qtype == QuestionType::AOrB);
    if list {
        let mut cells: Vec<CellRef> = result.values.iter().flat_map(|v| v.cells.iter().cloned()).collect();
        cells.sort();
        cells.dedup();
        Answer { value: AnswerValue::List(result.values.iter().map(|v| v.value.clone()).collect()), cells }
    } else {
        Answer { value: AnswerValue::Scalar(first.value.clone()), cells: first.cells.clone() }
    }
}

#[cfg(test)]
mod tests;
