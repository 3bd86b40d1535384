//! Training labels by execution: try every eligible column in the missing
//! slot and keep the question only when exactly one choice reproduces the
//! gold answer.

use rayon::prelude::*;

use super::abduct::eligible_columns;
use super::TrainingExample;
use crate::annotate::AnnotatedQuery;
use crate::eval::answer_match;
use crate::executor::{build_plan, execute, normalize_answer, QueryPlan, ResultSet};
use crate::grammar::{AbductionMethod, Operand, OperandSource, SemanticParse};
use crate::oracle::oracle_execute;
use crate::question_typer::{MissingOperandReport, OperandKind};
use crate::table::{ColumnId, ComprehendedTable};

/// A question whose chosen parse lacks one column operand.
#[derive(Clone, Debug)]
pub struct CorpusItem<'a> {
    pub question_id: Option<String>,
    pub aq: AnnotatedQuery,
    /// Classified parse (question type set).
    pub parse: SemanticParse,
    pub report: MissingOperandReport,
    pub table: &'a ComprehendedTable,
    pub gold: Vec<String>,
}

/// The kind of the single missing column operand, if exactly one is missing.
pub fn single_missing_slot(report: &MissingOperandReport) -> Option<OperandKind> {
    match report.missing.as_slice() {
        [slot] if slot.count == 1 && slot.kind != OperandKind::Filter => Some(slot.kind),
        _ => None,
    }
}

/// The parse with `column` placed in a slot of `kind`.
pub fn substitute(parse: &SemanticParse, kind: OperandKind, column: ColumnId, terms: &[String]) -> SemanticParse {
    let mut p = parse.clone();
    let op = Operand {
        column,
        source: OperandSource::Abduced { terms: terms.to_vec(), confidence: None, method: AbductionMethod::Learned },
        headword: false,
    };
    match kind {
        OperandKind::Metric => p.metrics.push(op),
        _ => p.dimensions.push(op),
    }
    p
}

fn correct_columns(item: &CorpusItem, kind: OperandKind, candidates: &[ColumnId], run: fn(&QueryPlan, &ComprehendedTable) -> ResultSet) -> Vec<usize> {
    let qtype = item.report.question_type;
    candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| {
            let p = substitute(&item.parse, kind, (*c).clone(), &item.report.terms);
            let Ok(plan) = build_plan(&p, item.table) else { return false };
            let answer = normalize_answer(&run(&plan, item.table), qtype, item.aq.headword_plural);
            !answer.value.is_none() && answer_match(&answer.value.strings(), &item.gold)
        })
        .map(|(i, _)| i)
        .collect()
}

fn example_for(item: &CorpusItem) -> Option<TrainingExample> {
    let kind = single_missing_slot(&item.report)?;
    if item.report.terms.is_empty() {
        return None;
    }
    let candidates = eligible_columns(&item.parse, item.report.question_type, kind, item.table);
    if candidates.len() < 2 {
        return None;
    }
    let [correct] = correct_columns(item, kind, &candidates, execute)[..] else { return None };
    let columns = candidates.iter().map(|c| item.table.column(c).map(|x| x.name.clone()).unwrap_or_default()).collect();
    Some(TrainingExample {
        terms: item.report.terms.clone(),
        columns,
        correct,
        column_ids: candidates,
        question_id: item.question_id.clone(),
    })
}

/// One example per question with a unique correct substitution, in input order.
pub fn generate_training_data(items: &[CorpusItem]) -> Vec<TrainingExample> {
    items.par_iter().filter_map(example_for).collect()
}

/// Re-derive the label with the reference evaluator.
pub fn verify_example(item: &CorpusItem, example: &TrainingExample) -> bool {
    let Some(kind) = single_missing_slot(&item.report) else { return false };
    correct_columns(item, kind, &example.column_ids, oracle_execute) == vec![example.correct]
}
