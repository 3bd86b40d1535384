//! Renders a plan as the equivalent SQL text for display.

use super::plan::{AggregateFn, Output, Predicate, QueryPlan, Stage};
use crate::grammar::{Direction, Relation};
use crate::table::{format_number, ColumnId, ColumnRole, ComprehendedTable};

pub fn to_sql(plan: &QueryPlan, table: &ComprehendedTable) -> String {
    let inner = plan.inner.as_ref().map(|s| stage_sql(s, table, None));
    stage_sql(&plan.outer, table, inner.as_deref())
}

fn quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

fn col(id: &ColumnId, table: &ComprehendedTable) -> String {
    let Some(c) = table.column(id) else { return format!("\"{id}\"") };
    let name = format!("\"{}\"", c.name.replace('"', "\"\""));
    match c.role {
        ColumnRole::Metric if !id.is_row_id() && c.origin.is_some_and(|o| o.part.is_none()) => format!("CAST({name} AS NUMBER)"),
        ColumnRole::Date => format!("CAST({name} AS DATE)"),
        ColumnRole::Time => format!("CAST({name} AS TIME)"),
        _ => name,
    }
}

fn pred(p: &Predicate, table: &ComprehendedTable, inner: Option<&str>) -> String {
    match p {
        Predicate::Equals { column, value } => format!("{} = {}", col(column, table), quote(value)),
        Predicate::Compare { column, op, bound } => format!("{} {} {}", col(column, table), op.symbol(), format_number(*bound)),
        Predicate::Any { of } => {
            let parts: Vec<String> = of.iter().map(|q| pred(q, table, inner)).collect();
            format!("({})", parts.join(" OR "))
        }
        Predicate::Not { inner: q } => format!("NOT ({})", pred(q, table, inner)),
        Predicate::InInner { column } => format!("{} IN ({})", col(column, table), inner.unwrap_or("")),
    }
}

fn stage_sql(stage: &Stage, table: &ComprehendedTable, inner: Option<&str>) -> String {
    let from = format!("\"{}\"", table.name);
    let mut conds: Vec<String> = stage.predicates.iter().map(|p| pred(p, table, inner)).collect();
    if let Some(step) = &stage.position {
        let offset = match step.relation {
            Relation::Before => "- 1",
            Relation::After => "+ 1",
        };
        conds.push(format!(
            "RowID = (SELECT MIN(RowID) FROM {from} WHERE {}) {offset}",
            pred(&step.anchor, table, inner)
        ));
    }
    let select = match &stage.output {
        Output::Rows { column } => {
            format!("SELECT {}{}", if stage.distinct { "DISTINCT " } else { "" }, col(column, table))
        }
        Output::Aggregate { func, column } => {
            let c = col(column, table);
            match func {
                AggregateFn::Count => format!("SELECT COUNT({c})"),
                AggregateFn::CountDistinct => format!("SELECT COUNT(DISTINCT {c})"),
                AggregateFn::Sum => format!("SELECT SUM({c})"),
                AggregateFn::Average => format!("SELECT AVG({c})"),
                AggregateFn::Max => format!("SELECT MAX({c})"),
                AggregateFn::Min => format!("SELECT MIN({c})"),
            }
        }
        Output::SelectEach { column, selectors } => {
            let c = col(column, table);
            let parts: Vec<String> = selectors
                .iter()
                .map(|s| format!("(SELECT {c} FROM {from} WHERE {} LIMIT 1)", pred(s, table, inner)))
                .collect();
            return format!("SELECT {}", parts.join(", "));
        }
        Output::AbsDifference => return format!("SELECT ABS(a - b) FROM ({}) AS pair(a, b)", inner.unwrap_or("")),
    };
    let mut sql = format!("{select} FROM {from}");
    if !conds.is_empty() {
        sql.push_str(" WHERE ");
        sql.push_str(&conds.join(" AND "));
    }
    if let Some(o) = &stage.order {
        let dir = match o.direction {
            Direction::Asc => "ASC",
            Direction::Desc => "DESC",
        };
        sql.push_str(&format!(" ORDER BY {} {dir}", col(&o.column, table)));
    }
    if let Some(n) = stage.limit {
        sql.push_str(&format!(" LIMIT {n}"));
    }
    sql
}
