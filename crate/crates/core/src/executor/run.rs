use std::collections::HashSet;

use super::plan::{AggregateFn, Output, Predicate, QueryPlan, Stage};
use super::{CellRef, ResultSet, ResultValue};
use crate::grammar::{Direction, Relation};
use crate::table::{ColumnId, ComprehendedTable, TypedValue};
use crate::text::normalize;

pub fn execute(plan: &QueryPlan, table: &ComprehendedTable) -> ResultSet {
    let inner = plan.inner.as_ref().map(|s| run_stage(s, table, None));
    run_stage(&plan.outer, table, inner.as_ref())
}

struct Ctx<'a> {
    table: &'a ComprehendedTable,
    inner: Option<HashSet<String>>,
}

fn text_key(v: &TypedValue) -> Option<String> {
    if v.is_empty() {
        None
    } else {
        Some(normalize(&v.render()))
    }
}

impl Ctx<'_> {
    fn value(&self, column: &ColumnId, row: usize) -> &TypedValue {
        self.table.value(column, row).unwrap_or(&TypedValue::Empty)
    }

    fn holds(&self, p: &Predicate, row: usize) -> bool {
        match p {
            Predicate::Equals { column, value } => text_key(self.value(column, row)).as_deref() == Some(value.as_str()),
            Predicate::Compare { column, op, bound } => {
                let v = self.value(column, row);
                match v.order_key() {
                    Some(k) => op.holds(k, *bound),
                    None => {
                        if !v.is_empty() {
                            log::debug!("{column} row {row}: {v} is not comparable");
                        }
                        false
                    }
                }
            }
            Predicate::Any { of } => of.iter().any(|q| self.holds(q, row)),
            Predicate::Not { inner } => !self.holds(inner, row),
            Predicate::InInner { column } => match (&self.inner, text_key(self.value(column, row))) {
                (Some(set), Some(k)) => set.contains(&k),
                _ => false,
            },
        }
    }
}

fn run_stage(stage: &Stage, table: &ComprehendedTable, inner: Option<&ResultSet>) -> ResultSet {
    let ctx = Ctx { table, inner: inner.map(|r| r.values.iter().filter_map(|v| text_key(&v.value)).collect()) };
    let mut rows: Vec<usize> =
        table.body_rows.iter().copied().filter(|&r| stage.predicates.iter().all(|p| ctx.holds(p, r))).collect();

    if let Some(step) = &stage.position {
        let picked = rows.iter().position(|&r| ctx.holds(&step.anchor, r)).and_then(|i| match step.relation {
            Relation::Before => i.checked_sub(1),
            Relation::After => Some(i + 1),
        });
        rows = picked.and_then(|i| rows.get(i).copied()).into_iter().collect();
    }

    if let Some(order) = &stage.order {
        let mut keyed: Vec<(f64, usize)> =
            rows.iter().filter_map(|&r| ctx.value(&order.column, r).order_key().map(|k| (k, r))).collect();
        match order.direction {
            Direction::Asc => keyed.sort_by(|a, b| a.0.total_cmp(&b.0)),
            Direction::Desc => keyed.sort_by(|a, b| b.0.total_cmp(&a.0)),
        }
        rows = keyed.into_iter().map(|(_, r)| r).collect();
    }
    if let Some(n) = stage.limit {
        rows.truncate(n);
    }

    let cell = |column: &ColumnId, row: usize| CellRef { column: column.clone(), row };
    let mut out = ResultSet::default();
    match &stage.output {
        Output::Rows { column } => {
            let mut seen = HashSet::new();
            for &r in &rows {
                let v = ctx.value(column, r);
                let Some(k) = text_key(v) else { continue };
                if stage.distinct && !seen.insert(k) {
                    continue;
                }
                out.values.push(ResultValue { value: v.clone(), cells: vec![cell(column, r)] });
            }
        }
        Output::Aggregate { func, column } => {
            let present: Vec<usize> = rows.iter().copied().filter(|&r| !ctx.value(column, r).is_empty()).collect();
            let cells: Vec<CellRef> = present.iter().map(|&r| cell(column, r)).collect();
            let value = match func {
                AggregateFn::Count => Some(TypedValue::number(present.len() as f64)),
                AggregateFn::CountDistinct => {
                    let distinct: HashSet<String> = present.iter().filter_map(|&r| text_key(ctx.value(column, r))).collect();
                    Some(TypedValue::number(distinct.len() as f64))
                }
                AggregateFn::Sum | AggregateFn::Average => {
                    let nums: Vec<f64> = present.iter().filter_map(|&r| ctx.value(column, r).as_number()).collect();
                    if nums.is_empty() {
                        None
                    } else {
                        let sum: f64 = nums.iter().sum();
                        Some(TypedValue::number(if *func == AggregateFn::Sum { sum } else { sum / nums.len() as f64 }))
                    }
                }
                AggregateFn::Max | AggregateFn::Min => {
                    let mut best: Option<(f64, usize)> = None;
                    for &r in &present {
                        let Some(k) = ctx.value(column, r).order_key() else { continue };
                        let better = match best {
                            None => true,
                            Some((b, _)) => if *func == AggregateFn::Max { k > b } else { k < b },
                        };
                        if better {
                            best = Some((k, r));
                        }
                    }
                    if let Some((_, r)) = best {
                        out.values.push(ResultValue { value: ctx.value(column, r).clone(), cells: vec![cell(column, r)] });
                    }
                    None
                }
            };
            if let Some(value) = value {
                out.values.push(ResultValue { value, cells });
            }
        }
        Output::SelectEach { column, selectors } => {
            for s in selectors {
                let found = rows.iter().copied().find(|&r| ctx.holds(s, r) && !ctx.value(column, r).is_empty());
                match found {
                    Some(r) => out.values.push(ResultValue { value: ctx.value(column, r).clone(), cells: vec![cell(column, r)] }),
                    None => return ResultSet::default(),
                }
            }
        }
        Output::AbsDifference => {
            let Some(inner) = inner else { return out };
            if let [a, b] = inner.values.as_slice() {
                if let (Some(x), Some(y)) = (a.value.as_number(), b.value.as_number()) {
                    let d = (x - y).abs();
                    let cells = a.cells.iter().chain(&b.cells).cloned().collect();
                    out.values.push(ResultValue { value: TypedValue::number(d), cells });
                }
            }
        }
    }
    out
}
