use serde::{Deserialize, Serialize};

use super::{predict, PredictorModel, Prediction};
use crate::error::{Error, Result};
use crate::grammar::{AbductionMethod, Operand, OperandSource, SemanticParse};
use crate::question_typer::{MissingOperandReport, OperandKind, QuestionType};
use crate::table::{ColumnId, ColumnRole, ComprehendedTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbductionMode {
    /// The trained operand model.
    Ml,
    /// Leftmost string-valued column.
    Baseline,
    /// Leave missing operands missing.
    Off,
}

impl std::str::FromStr for AbductionMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ml" => Ok(AbductionMode::Ml),
            "baseline" => Ok(AbductionMode::Baseline),
            "off" => Ok(AbductionMode::Off),
            _ => Err(format!("unknown abduction mode {s:?} (expected ml, baseline or off)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AbductionOutcome {
    pub parse: SemanticParse,
    /// Slots filled, in fill order.
    pub filled: Vec<(OperandKind, ColumnId)>,
    /// Model output per filled kind, when the model was used.
    pub predictions: Vec<(OperandKind, Vec<ColumnId>, Prediction)>,
    /// Every column slot of the report was filled.
    pub complete: bool,
}

/// Leftmost dimension column with no numeric, date or time reading.
pub fn baseline_leftmost_string(table: &ComprehendedTable) -> Result<ColumnId> {
    table
        .dimensions()
        .find(|c| is_string_column(table, &c.id))
        .map(|c| c.id.clone())
        .ok_or(Error::NoDimensionColumn)
}

fn is_string_column(table: &ComprehendedTable, id: &ColumnId) -> bool {
    let Some(c) = table.column(id) else { return false };
    c.is_dimension()
        && c.origin.is_some_and(|o| o.part.is_none())
        && !table.twins(id).iter().any(|t| matches!(t.role, ColumnRole::Metric | ColumnRole::Date | ColumnRole::Time))
}

/// Candidate columns for a missing slot, in table order. Columns the parse
/// already uses are excluded; so are filter columns, except for SAME_VALUE
/// whose answer shares the anchor's column. A missing HOW_MANY metric is a
/// count, so it ranges over dimensions and RowID.
pub fn eligible_columns(parse: &SemanticParse, qtype: QuestionType, kind: OperandKind, table: &ComprehendedTable) -> Vec<ColumnId> {
    let used: Vec<&ColumnId> = parse.dimensions.iter().chain(&parse.metrics).map(|o| &o.column).collect();
    let filter_cols: Vec<&ColumnId> = parse.filters.iter().map(|f| f.column()).collect();
    let exclude_filters = qtype != QuestionType::SameValue;
    let dims = || {
        table
            .dimensions()
            .filter(|c| !used.contains(&&c.id) && !(exclude_filters && filter_cols.contains(&&c.id)))
            .map(|c| c.id.clone())
    };
    let metrics = || table.metrics().filter(|c| !used.contains(&&c.id)).map(|c| c.id.clone());
    let mut out: Vec<ColumnId> = match kind {
        OperandKind::Dimension => dims().collect(),
        OperandKind::Metric if qtype == QuestionType::HowMany => dims().chain([table.row_id()]).collect(),
        OperandKind::Metric => metrics().collect(),
        OperandKind::AnyColumn => dims().chain(metrics()).collect(),
        OperandKind::Filter => Vec::new(),
    };
    if out.is_empty() && exclude_filters && kind == OperandKind::Dimension {
        out = table.dimensions().filter(|c| !used.contains(&&c.id)).map(|c| c.id.clone()).collect();
    }
    out
}

fn heading(table: &ComprehendedTable, id: &ColumnId) -> String {
    table.column(id).map(|c| c.name.clone()).unwrap_or_else(|| id.to_string())
}

/// Baseline order: string columns first, then the rest, each left to right.
/// A count defaults to counting rows, so RowID leads.
fn baseline_order(table: &ComprehendedTable, cols: &[ColumnId]) -> Vec<ColumnId> {
    let (row_id, cols): (Vec<ColumnId>, Vec<ColumnId>) = cols.iter().cloned().partition(ColumnId::is_row_id);
    let (strings, rest): (Vec<ColumnId>, Vec<ColumnId>) = cols.into_iter().partition(|c| is_string_column(table, c));
    row_id.into_iter().chain(strings).chain(rest).collect()
}

/// Fill the report's missing column slots.
pub fn abduct(
    parse: &SemanticParse,
    report: &MissingOperandReport,
    mode: AbductionMode,
    model: Option<&PredictorModel>,
    table: &ComprehendedTable,
) -> Result<AbductionOutcome> {
    if mode == AbductionMode::Ml && model.is_none() {
        return Err(Error::ModelRequired);
    }
    let mut out = AbductionOutcome { parse: parse.clone(), filled: Vec::new(), predictions: Vec::new(), complete: false };
    let column_slots = report.missing.iter().filter(|m| m.kind != OperandKind::Filter);
    let mut complete = report.count(OperandKind::Filter) == 0;
    if mode == AbductionMode::Off {
        out.complete = report.is_complete();
        return Ok(out);
    }
    for slot in column_slots {
        let candidates = eligible_columns(&out.parse, report.question_type, slot.kind, table);
        let (chosen, method, confidences) = match (mode, model) {
            (AbductionMode::Ml, Some(m)) if !candidates.is_empty() => {
                let headings: Vec<String> = candidates.iter().map(|c| heading(table, c)).collect();
                let pred = predict(m, &report.terms, &headings)?;
                if pred.known_terms == 0 {
                    let order = baseline_order(table, &candidates);
                    (order, AbductionMethod::OovFallback, None)
                } else {
                    let ranking = pred.ranking();
                    let chosen: Vec<ColumnId> = ranking.iter().map(|&i| candidates[i].clone()).collect();
                    let conf: Vec<f64> = ranking.iter().map(|&i| pred.probabilities[i]).collect();
                    out.predictions.push((slot.kind, candidates.clone(), pred));
                    (chosen, AbductionMethod::Learned, Some(conf))
                }
            }
            _ => (baseline_order(table, &candidates), AbductionMethod::Baseline, None),
        };
        if chosen.len() < slot.count {
            complete = false;
        }
        for (i, column) in chosen.into_iter().take(slot.count).enumerate() {
            let op = Operand {
                column: column.clone(),
                source: OperandSource::Abduced {
                    terms: report.terms.clone(),
                    confidence: confidences.as_ref().map(|c| c[i]),
                    method,
                },
                headword: false,
            };
            match slot.kind {
                OperandKind::Metric => out.parse.metrics.push(op),
                _ => out.parse.dimensions.push(op),
            }
            out.filled.push((slot.kind, column));
        }
    }
    out.complete = complete;
    Ok(out)
}
