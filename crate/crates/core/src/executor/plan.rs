use serde::Serialize;

use crate::error::{Error, Result};
use crate::grammar::{Aggregation, Comparator, Direction, Filter, Ordinal, Relation, SemanticParse};
use crate::question_typer::{required_operands, QuestionType};
use crate::table::{ColumnId, ColumnRole, ComprehendedTable};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Predicate {
    /// Normalized text equality.
    Equals { column: ColumnId, value: String },
    /// Numeric or chronological comparison.
    Compare { column: ColumnId, op: Comparator, bound: f64 },
    Any { of: Vec<Predicate> },
    Not { inner: Box<Predicate> },
    /// The value occurs among the inner stage's output.
    InInner { column: ColumnId },
}

impl Predicate {
    fn columns<'a>(&'a self, out: &mut Vec<&'a ColumnId>) {
        match self {
            Predicate::Equals { column, .. } | Predicate::Compare { column, .. } | Predicate::InInner { column } => {
                out.push(column)
            }
            Predicate::Any { of } => of.iter().for_each(|p| p.columns(out)),
            Predicate::Not { inner } => inner.columns(out),
        }
    }

    fn uses_inner(&self) -> bool {
        match self {
            Predicate::InInner { .. } => true,
            Predicate::Any { of } => of.iter().any(Predicate::uses_inner),
            Predicate::Not { inner } => inner.uses_inner(),
            _ => false,
        }
    }
}

/// Select the row adjacent to the first anchor row among the filtered rows.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PositionStep {
    pub relation: Relation,
    pub anchor: Predicate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderBy {
    pub column: ColumnId,
    pub direction: Direction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregateFn {
    Count,
    CountDistinct,
    Sum,
    Average,
    Max,
    Min,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Output {
    Rows { column: ColumnId },
    Aggregate { func: AggregateFn, column: ColumnId },
    /// The first value of `column` among rows matching each selector.
    SelectEach { column: ColumnId, selectors: Vec<Predicate> },
    /// Absolute difference of the inner stage's two values.
    AbsDifference,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Stage {
    pub predicates: Vec<Predicate>,
    pub position: Option<PositionStep>,
    pub order: Option<OrderBy>,
    pub limit: Option<usize>,
    pub distinct: bool,
    pub output: Output,
}

impl Stage {
    pub fn project(column: ColumnId) -> Self {
        Stage { predicates: Vec::new(), position: None, order: None, limit: None, distinct: false, output: Output::Rows { column } }
    }

    fn columns(&self) -> Vec<&ColumnId> {
        let mut out = Vec::new();
        self.predicates.iter().for_each(|p| p.columns(&mut out));
        if let Some(p) = &self.position {
            p.anchor.columns(&mut out);
        }
        if let Some(o) = &self.order {
            out.push(&o.column);
        }
        match &self.output {
            Output::Rows { column } | Output::Aggregate { column, .. } => out.push(column),
            Output::SelectEach { column, selectors } => {
                out.push(column);
                selectors.iter().for_each(|p| p.columns(&mut out));
            }
            Output::AbsDifference => {}
        }
        out
    }

    fn uses_inner(&self) -> bool {
        self.predicates.iter().any(Predicate::uses_inner)
            || self.position.as_ref().is_some_and(|p| p.anchor.uses_inner())
            || matches!(self.output, Output::AbsDifference)
            || matches!(&self.output, Output::SelectEach { selectors, .. } if selectors.iter().any(Predicate::uses_inner))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QueryPlan {
    pub table: String,
    pub question_type: QuestionType,
    pub inner: Option<Stage>,
    pub outer: Stage,
}

impl QueryPlan {
    /// Every referenced column exists and inner-stage references only occur
    /// in an outer stage that has an inner stage.
    pub fn validate(&self, table: &ComprehendedTable) -> Result<()> {
        let stages = self.inner.iter().chain(std::iter::once(&self.outer));
        for c in stages.flat_map(Stage::columns) {
            if table.column(c).is_none() {
                return Err(Error::IncompleteParse(format!("unknown column {c}")));
            }
        }
        if self.inner.as_ref().is_some_and(Stage::uses_inner) {
            return Err(Error::IncompleteParse("inner stage refers to a nested result".into()));
        }
        if self.inner.is_none() && self.outer.uses_inner() {
            return Err(Error::IncompleteParse("outer stage refers to a missing inner stage".into()));
        }
        Ok(())
    }
}

fn predicate(f: &Filter) -> Option<Predicate> {
    match f {
        Filter::Equals { column, value, .. } => Some(Predicate::Equals { column: column.clone(), value: value.clone() }),
        Filter::Compare { column, op, bound, .. } => Some(Predicate::Compare { column: column.clone(), op: *op, bound: *bound }),
        Filter::Position { .. } => None,
    }
}

/// The single date or time column, else RowID.
pub(crate) fn chronology(table: &ComprehendedTable) -> ColumnId {
    let chrono: Vec<_> =
        table.columns.iter().filter(|c| matches!(c.role, ColumnRole::Date | ColumnRole::Time)).collect();
    match chrono.as_slice() {
        [c] => c.id.clone(),
        _ => table.row_id(),
    }
}

fn descending(d: Option<Direction>) -> Direction {
    d.unwrap_or(Direction::Desc)
}

/// Map a classified, complete parse to a plan.
pub fn build_plan(parse: &SemanticParse, table: &ComprehendedTable) -> Result<QueryPlan> {
    let qtype = parse
        .question_type
        .ok_or_else(|| Error::IncompleteParse("parse has no question type".into()))?;
    let req = required_operands(qtype);
    let missing = |what: &str, need: usize, have: usize| {
        if have < need {
            Err(Error::IncompleteParse(format!("{qtype} needs {need} {what}, found {have}")))
        } else {
            Ok(())
        }
    };
    missing("dimension(s)", req.dimensions, parse.dimensions.len())?;
    missing("metric(s)", req.metrics, parse.metrics.len())?;
    missing("filter(s)", req.filters, parse.filters.len())?;
    missing("column(s)", req.any_columns, parse.columns().len())?;

    let predicates: Vec<Predicate> = parse.filters.iter().filter_map(predicate).collect();
    let dim = |i: usize| parse.dimensions[i].column.clone();
    let metric = || parse.metrics[0].column.clone();
    let base = |output: Output| Stage {
        predicates: predicates.clone(),
        position: None,
        order: None,
        limit: None,
        distinct: false,
        output,
    };
    let mut inner = None;

    let outer = match qtype {
        QuestionType::Lookup => Stage { distinct: true, ..base(Output::Rows { column: dim(0) }) },
        QuestionType::SortMet => {
            let func = match descending(parse.sort) {
                Direction::Desc => AggregateFn::Max,
                Direction::Asc => AggregateFn::Min,
            };
            base(Output::Aggregate { func, column: metric() })
        }
        QuestionType::SortDim => Stage {
            order: Some(OrderBy { column: metric(), direction: descending(parse.sort) }),
            limit: Some(parse.limit.unwrap_or(1) as usize),
            ..base(Output::Rows { column: dim(0) })
        },
        QuestionType::FirstLast => {
            let direction = match parse.ordinal {
                Some(Ordinal::Last) => Direction::Desc,
                _ => Direction::Asc,
            };
            Stage {
                order: Some(OrderBy { column: chronology(table), direction }),
                limit: Some(parse.limit.unwrap_or(1) as usize),
                ..base(Output::Rows { column: dim(0) })
            }
        }
        QuestionType::HowMany => {
            let column = metric();
            let col = table.column(&column).ok_or_else(|| Error::IncompleteParse(format!("unknown column {column}")))?;
            let chronological = table.twins(&column).iter().any(|c| matches!(c.role, ColumnRole::Date | ColumnRole::Time));
            let (func, column) = match parse.aggregation {
                Some(Aggregation::Average) => (AggregateFn::Average, column),
                Some(Aggregation::Sum) if col.is_metric() && !column.is_row_id() => (AggregateFn::Sum, column),
                _ if column.is_row_id() => (AggregateFn::Count, column),
                _ if col.is_dimension() => (AggregateFn::CountDistinct, column),
                // Counting years is counting distinct years, not adding them.
                _ if chronological => {
                    let dim = col.origin.and_then(|o| table.source_dimension(o.source)).map(|c| c.id.clone());
                    (AggregateFn::CountDistinct, dim.unwrap_or(column))
                }
                _ => (AggregateFn::Sum, column),
            };
            base(Output::Aggregate { func, column })
        }
        QuestionType::Difference => {
            let selectors: Vec<Predicate> = parse.filters.iter().filter_map(predicate).take(2).collect();
            if selectors.len() != 2 {
                return Err(Error::IncompleteParse("DIFFERENCE needs two equality filters".into()));
            }
            inner = Some(Stage { predicates: Vec::new(), ..base(Output::SelectEach { column: metric(), selectors }) });
            Stage { predicates: Vec::new(), ..base(Output::AbsDifference) }
        }
        QuestionType::AOrB => {
            let (alternatives, conditions): (Vec<&Filter>, Vec<&Filter>) =
                parse.filters.iter().partition(|f| f.is_equals());
            if alternatives.len() < 2 {
                return Err(Error::IncompleteParse("A_OR_B needs two equality filters".into()));
            }
            let alternatives = &alternatives[..2];
            let projected = alternatives[0].column().clone();
            let mut predicates = vec![Predicate::Any { of: alternatives.iter().filter_map(|f| predicate(f)).collect() }];
            predicates.extend(conditions.iter().filter_map(|f| predicate(f)));
            let order = match (parse.metrics.first(), conditions.is_empty()) {
                (Some(m), true) => Some(OrderBy { column: m.column.clone(), direction: descending(parse.sort) }),
                _ => None,
            };
            let limit = order.as_ref().map(|_| 1);
            Stage { predicates, order, limit, distinct: true, position: None, output: Output::Rows { column: projected } }
        }
        QuestionType::PosBoth => {
            let mut eq = predicates.clone();
            if eq.len() < 2 {
                return Err(Error::IncompleteParse("POS_BOTH needs two filters".into()));
            }
            let second = eq.remove(1);
            let first = eq.remove(0);
            let column = dim(0);
            inner = Some(Stage { predicates: vec![first], distinct: true, ..base(Output::Rows { column: column.clone() }) });
            let mut outer_preds = vec![second, Predicate::InInner { column: column.clone() }];
            outer_preds.extend(eq);
            Stage { predicates: outer_preds, distinct: true, ..base(Output::Rows { column }) }
        }
        QuestionType::SameValue => {
            let anchor = predicates
                .first()
                .cloned()
                .ok_or_else(|| Error::IncompleteParse("SAME_VALUE needs an equality filter".into()))?;
            let (answer, compared) = same_value_columns(parse);
            inner = Some(Stage { predicates: vec![anchor.clone()], distinct: true, ..base(Output::Rows { column: compared.clone() }) });
            let mut outer_preds = vec![Predicate::InInner { column: compared }, Predicate::Not { inner: Box::new(anchor) }];
            outer_preds.extend(predicates.iter().skip(1).cloned());
            Stage { predicates: outer_preds, distinct: true, ..base(Output::Rows { column: answer }) }
        }
        QuestionType::BefAfter => {
            let (relation, column, value) = parse
                .filters
                .iter()
                .find_map(|f| match f {
                    Filter::Position { relation, column, value, .. } => Some((*relation, column.clone(), value.clone())),
                    _ => None,
                })
                .ok_or_else(|| Error::IncompleteParse("BEF_AFTER needs a before/after anchor".into()))?;
            let projected = parse.dimensions.first().map(|d| d.column.clone()).unwrap_or_else(|| column.clone());
            Stage {
                position: Some(PositionStep { relation, anchor: Predicate::Equals { column, value } }),
                ..base(Output::Rows { column: projected })
            }
        }
        QuestionType::OtherType => {
            let column = parse.columns()[0].clone();
            Stage { distinct: true, ..base(Output::Rows { column }) }
        }
    };
    let plan = QueryPlan { table: table.name.clone(), question_type: qtype, inner, outer };
    plan.validate(table)?;
    Ok(plan)
}

/// (answer, compared). The answer is the headword or abduced dimension, else
/// the one holding the anchor's column.
fn same_value_columns(parse: &SemanticParse) -> (ColumnId, ColumnId) {
    let anchor_col = parse.filters.first().map(|f| f.column().clone());
    let dims = &parse.dimensions;
    let answer_idx = dims
        .iter()
        .position(|d| d.headword || d.is_abduced())
        .or_else(|| dims.iter().position(|d| Some(&d.column) == anchor_col.as_ref()))
        .unwrap_or(0);
    let compared_idx = if answer_idx == 0 { 1 } else { 0 };
    (dims[answer_idx].column.clone(), dims[compared_idx].column.clone())
}
