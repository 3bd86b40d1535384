//! A deliberately naive second evaluator for query plans, used to cross-check
//! the executor. It re-derives every semantic rule by brute-force scanning
//! and shares no evaluation code with it.

use crate::executor::{AggregateFn, CellRef, Output, Predicate, QueryPlan, ResultSet, ResultValue, Stage};
use crate::grammar::{Comparator, Direction, Relation};
use crate::table::{ColumnId, ComprehendedTable, TypedValue};
use crate::text::normalize;

pub fn oracle_execute(plan: &QueryPlan, table: &ComprehendedTable) -> ResultSet {
    let inner = plan.inner.as_ref().map(|s| stage(s, table, &[]));
    let inner_vals: Vec<TypedValue> = inner.as_ref().map(|r| r.values.iter().map(|v| v.value.clone()).collect()).unwrap_or_default();
    let mut out = stage(&plan.outer, table, &inner_vals);
    if matches!(plan.outer.output, Output::AbsDifference) {
        out = ResultSet::default();
        if let Some(r) = &inner {
            if r.values.len() == 2 {
                if let (Some(a), Some(b)) = (number(&r.values[0].value), number(&r.values[1].value)) {
                    let mut cells = r.values[0].cells.clone();
                    cells.extend(r.values[1].cells.clone());
                    out.values.push(ResultValue { value: TypedValue::number(if a > b { a - b } else { b - a }), cells });
                }
            }
        }
    }
    out
}

fn get<'a>(table: &'a ComprehendedTable, column: &ColumnId, row: usize) -> Option<&'a TypedValue> {
    for c in &table.columns {
        if &c.id == column {
            return match c.values.get(row) {
                Some(TypedValue::Empty) | None => None,
                Some(v) => Some(v),
            };
        }
    }
    None
}

fn number(v: &TypedValue) -> Option<f64> {
    match v {
        TypedValue::Number { value, .. } => Some(*value),
        TypedValue::Date { date } if date.month.is_none() && date.day.is_none() => date.year.map(|y| y as f64),
        _ => None,
    }
}

fn sortable(v: &TypedValue) -> Option<f64> {
    match v {
        TypedValue::Number { value, .. } => Some(*value),
        TypedValue::Date { date } => Some(
            date.year.unwrap_or(0) as f64 * 10_000.0
                + date.month.unwrap_or(0) as f64 * 100.0
                + date.day.unwrap_or(0) as f64,
        ),
        TypedValue::Time { seconds } => Some(*seconds),
        _ => None,
    }
}

fn same_text(a: &TypedValue, b: &TypedValue) -> bool {
    normalize(&a.render()) == normalize(&b.render())
}

fn test(p: &Predicate, table: &ComprehendedTable, row: usize, inner: &[TypedValue]) -> bool {
    match p {
        Predicate::Equals { column, value } => get(table, column, row).is_some_and(|v| normalize(&v.render()) == *value),
        Predicate::Compare { column, op, bound } => {
            let Some(x) = get(table, column, row).and_then(sortable) else { return false };
            match op {
                Comparator::Gt => x > *bound,
                Comparator::Lt => x < *bound,
                Comparator::Ge => x >= *bound,
                Comparator::Le => x <= *bound,
                Comparator::Eq => x == *bound,
                Comparator::Ne => x != *bound,
            }
        }
        Predicate::Any { of } => {
            let mut any = false;
            for q in of {
                any |= test(q, table, row, inner);
            }
            any
        }
        Predicate::Not { inner: q } => !test(q, table, row, inner),
        Predicate::InInner { column } => match get(table, column, row) {
            Some(v) => inner.iter().any(|w| !w.is_empty() && same_text(v, w)),
            None => false,
        },
    }
}

fn stage(s: &Stage, table: &ComprehendedTable, inner: &[TypedValue]) -> ResultSet {
    let n = table.columns.first().map_or(0, |c| c.values.len());
    let mut rows = Vec::new();
    for r in 0..n {
        if table.total_rows.contains(&r) {
            continue;
        }
        if s.predicates.iter().all(|p| test(p, table, r, inner)) {
            rows.push(r);
        }
    }

    if let Some(step) = &s.position {
        let mut anchor = None;
        for (i, &r) in rows.iter().enumerate() {
            if test(&step.anchor, table, r, inner) {
                anchor = Some(i);
                break;
            }
        }
        let mut picked = Vec::new();
        if let Some(i) = anchor {
            let j = match step.relation {
                Relation::Before if i > 0 => Some(i - 1),
                Relation::Before => None,
                Relation::After => Some(i + 1),
            };
            if let Some(j) = j {
                if j < rows.len() {
                    picked.push(rows[j]);
                }
            }
        }
        rows = picked;
    }

    if let Some(o) = &s.order {
        // Selection sort; the earliest row wins ties.
        let mut pool: Vec<usize> = rows.into_iter().filter(|&r| get(table, &o.column, r).and_then(sortable).is_some()).collect();
        let mut sorted = Vec::new();
        while !pool.is_empty() {
            let mut best = 0;
            for i in 1..pool.len() {
                let a = get(table, &o.column, pool[i]).and_then(sortable).unwrap();
                let b = get(table, &o.column, pool[best]).and_then(sortable).unwrap();
                let better = match o.direction {
                    Direction::Asc => a < b,
                    Direction::Desc => a > b,
                };
                if better {
                    best = i;
                }
            }
            sorted.push(pool.remove(best));
        }
        rows = sorted;
    }
    if let Some(limit) = s.limit {
        while rows.len() > limit {
            rows.pop();
        }
    }

    let cell = |column: &ColumnId, row: usize| CellRef { column: column.clone(), row };
    let mut out = ResultSet::default();
    match &s.output {
        Output::Rows { column } => {
            for &r in &rows {
                let Some(v) = get(table, column, r) else { continue };
                if s.distinct && out.values.iter().any(|prev| same_text(&prev.value, v)) {
                    continue;
                }
                out.values.push(ResultValue { value: v.clone(), cells: vec![cell(column, r)] });
            }
        }
        Output::Aggregate { func, column } => {
            let present: Vec<usize> = rows.iter().copied().filter(|&r| get(table, column, r).is_some()).collect();
            let cells: Vec<CellRef> = present.iter().map(|&r| cell(column, r)).collect();
            match func {
                AggregateFn::Count => out.values.push(ResultValue { value: TypedValue::number(present.len() as f64), cells }),
                AggregateFn::CountDistinct => {
                    let mut distinct: Vec<&TypedValue> = Vec::new();
                    for &r in &present {
                        let v = get(table, column, r).unwrap();
                        if !distinct.iter().any(|d| same_text(d, v)) {
                            distinct.push(v);
                        }
                    }
                    out.values.push(ResultValue { value: TypedValue::number(distinct.len() as f64), cells });
                }
                AggregateFn::Sum | AggregateFn::Average => {
                    let mut total = 0.0;
                    let mut count = 0usize;
                    for &r in &present {
                        if let Some(x) = get(table, column, r).and_then(number) {
                            total += x;
                            count += 1;
                        }
                    }
                    if count > 0 {
                        let v = if *func == AggregateFn::Sum { total } else { total / count as f64 };
                        out.values.push(ResultValue { value: TypedValue::number(v), cells });
                    }
                }
                AggregateFn::Max | AggregateFn::Min => {
                    let mut best: Option<usize> = None;
                    for &r in &present {
                        let Some(x) = get(table, column, r).and_then(sortable) else { continue };
                        let replace = match best {
                            None => true,
                            Some(b) => {
                                let y = get(table, column, b).and_then(sortable).unwrap();
                                if *func == AggregateFn::Max { x > y } else { x < y }
                            }
                        };
                        if replace {
                            best = Some(r);
                        }
                    }
                    if let Some(r) = best {
                        out.values.push(ResultValue { value: get(table, column, r).unwrap().clone(), cells: vec![cell(column, r)] });
                    }
                }
            }
        }
        Output::SelectEach { column, selectors } => {
            for sel in selectors {
                let mut found = None;
                for &r in &rows {
                    if test(sel, table, r, inner) && get(table, column, r).is_some() {
                        found = Some(r);
                        break;
                    }
                }
                let Some(r) = found else { return ResultSet::default() };
                out.values.push(ResultValue { value: get(table, column, r).unwrap().clone(), cells: vec![cell(column, r)] });
            }
        }
        Output::AbsDifference => {}
    }
    out
}
