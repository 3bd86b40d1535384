//! Table comprehension: typed columns, numeric twins, score splits, RowID and
//! Total-row separation.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::load::RawTable;
use super::recognize::Recognizers;
use super::value::TypedValue;

/// Fraction of non-empty cells that must share a structure before a column
/// gets a typed twin.
const TYPED_SHARE: f64 = 0.8;

const TOTAL_MARKERS: [&str; 4] = ["total", "totals", "overall", "sum"];

pub const ROW_ID: &str = "row_id";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColumnId(pub String);

impl ColumnId {
    pub fn new(s: impl Into<String>) -> Self {
        ColumnId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_row_id(&self) -> bool {
        self.0 == ROW_ID
    }
}

impl fmt::Display for ColumnId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnRole {
    Dimension,
    Metric,
    Date,
    Time,
}

/// Where a comprehended column came from. `part` is set for the pieces of a
/// split composite column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnOrigin {
    pub source: usize,
    pub part: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComprehendedColumn {
    pub id: ColumnId,
    pub name: String,
    pub role: ColumnRole,
    pub values: Vec<TypedValue>,
    pub origin: Option<ColumnOrigin>,
}

impl ComprehendedColumn {
    pub fn is_dimension(&self) -> bool {
        self.role == ColumnRole::Dimension
    }

    pub fn is_metric(&self) -> bool {
        self.role == ColumnRole::Metric
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComprehendedTable {
    pub name: String,
    pub columns: Vec<ComprehendedColumn>,
    /// Source row indices of body (non-Total) rows, in table order.
    pub body_rows: Vec<usize>,
    pub total_rows: Vec<usize>,
    pub source_header: Vec<String>,
}

impl ComprehendedTable {
    pub fn row_count(&self) -> usize {
        self.body_rows.len() + self.total_rows.len()
    }

    pub fn column(&self, id: &ColumnId) -> Option<&ComprehendedColumn> {
        self.columns.iter().find(|c| &c.id == id)
    }

    pub fn column_index(&self, id: &ColumnId) -> Option<usize> {
        self.columns.iter().position(|c| &c.id == id)
    }

    pub fn value(&self, id: &ColumnId, row: usize) -> Option<&TypedValue> {
        self.column(id).and_then(|c| c.values.get(row))
    }

    /// Dimension columns in display order.
    pub fn dimensions(&self) -> impl Iterator<Item = &ComprehendedColumn> {
        self.columns.iter().filter(|c| c.is_dimension())
    }

    /// Metric columns in display order, RowID excluded.
    pub fn metrics(&self) -> impl Iterator<Item = &ComprehendedColumn> {
        self.columns.iter().filter(|c| c.is_metric() && !c.id.is_row_id())
    }

    pub fn row_id(&self) -> ColumnId {
        ColumnId::new(ROW_ID)
    }

    /// The columns derived from the same source column as `id`.
    pub fn twins(&self, id: &ColumnId) -> Vec<&ComprehendedColumn> {
        let Some(src) = self.column(id).and_then(|c| c.origin).map(|o| o.source) else {
            return Vec::new();
        };
        self.columns
            .iter()
            .filter(|c| c.origin.map(|o| o.source) == Some(src) && &c.id != id)
            .collect()
    }

    /// The dimension column carrying the original strings of source column
    /// `source`.
    pub fn source_dimension(&self, source: usize) -> Option<&ComprehendedColumn> {
        self.columns
            .iter()
            .find(|c| c.is_dimension() && c.origin == Some(ColumnOrigin { source, part: None }))
    }
}

/// Comprehend a raw table with the bundled recognizer inventory.
pub fn comprehend(raw: &RawTable) -> ComprehendedTable {
    comprehend_with(raw, Recognizers::default_set())
}

pub fn comprehend_with(raw: &RawTable, recognizers: &Recognizers) -> ComprehendedTable {
    let n_rows = raw.rows.len();
    let mut columns = Vec::new();
    for (k, name) in raw.header.iter().enumerate() {
        let cells: Vec<&str> = raw.rows.iter().map(|r| r[k].as_str()).collect();
        let parsed: Vec<TypedValue> = cells.iter().map(|c| recognizers.parse(c)).collect();
        let origin = Some(ColumnOrigin { source: k, part: None });

        columns.push(ComprehendedColumn {
            id: ColumnId(format!("c{k}")),
            name: name.clone(),
            role: ColumnRole::Dimension,
            values: cells
                .iter()
                .map(|c| if c.trim().is_empty() { TypedValue::Empty } else { TypedValue::text(c.trim()) })
                .collect(),
            origin,
        });

        let non_empty = parsed.iter().filter(|v| !v.is_empty()).count();
        if non_empty == 0 {
            continue;
        }
        let share = |pred: &dyn Fn(&TypedValue) -> bool| {
            parsed.iter().filter(|v| pred(v)).count() as f64 / non_empty as f64 >= TYPED_SHARE
        };

        if share(&|v| v.as_number().is_some()) {
            columns.push(ComprehendedColumn {
                id: ColumnId(format!("c{k}_num")),
                name: name.clone(),
                role: ColumnRole::Metric,
                values: parsed
                    .iter()
                    .zip(&cells)
                    .map(|(v, c)| match v.as_number() {
                        Some(value) => match v {
                            TypedValue::Number { .. } => v.clone(),
                            _ => TypedValue::Number { value, unit: None, surface: c.trim().to_string() },
                        },
                        None => TypedValue::Empty,
                    })
                    .collect(),
                origin,
            });
        }
        if share(&|v| matches!(v, TypedValue::Date { .. })) {
            columns.push(typed_twin(k, "date", name, ColumnRole::Date, &parsed, |v| {
                matches!(v, TypedValue::Date { .. })
            }));
        }
        if share(&|v| matches!(v, TypedValue::Time { .. })) {
            columns.push(typed_twin(k, "time", name, ColumnRole::Time, &parsed, |v| {
                matches!(v, TypedValue::Time { .. })
            }));
        }
        if share(&|v| matches!(v, TypedValue::Score { .. })) {
            columns.extend(split_scores(k, name, &parsed));
        }
    }

    let total_rows: Vec<usize> = (0..n_rows).filter(|&r| is_total_row(&raw.rows[r])).collect();
    let body_rows: Vec<usize> = (0..n_rows).filter(|r| !total_rows.contains(r)).collect();
    let mut row_ids = vec![TypedValue::Empty; n_rows];
    for (i, &r) in body_rows.iter().enumerate() {
        row_ids[r] = TypedValue::number(i as f64);
    }
    columns.push(ComprehendedColumn {
        id: ColumnId::new(ROW_ID),
        name: "RowID".into(),
        role: ColumnRole::Metric,
        values: row_ids,
        origin: None,
    });

    ComprehendedTable {
        name: raw.name.clone(),
        columns,
        body_rows,
        total_rows,
        source_header: raw.header.clone(),
    }
}

fn typed_twin(
    k: usize,
    suffix: &str,
    name: &str,
    role: ColumnRole,
    parsed: &[TypedValue],
    keep: impl Fn(&TypedValue) -> bool,
) -> ComprehendedColumn {
    ComprehendedColumn {
        id: ColumnId(format!("c{k}_{suffix}")),
        name: name.to_string(),
        role,
        values: parsed.iter().map(|v| if keep(v) { v.clone() } else { TypedValue::Empty }).collect(),
        origin: Some(ColumnOrigin { source: k, part: None }),
    }
}

/// Score cells split into result letter, points for and points against.
fn split_scores(k: usize, name: &str, parsed: &[TypedValue]) -> Vec<ComprehendedColumn> {
    let mut result = Vec::with_capacity(parsed.len());
    let mut pf = Vec::with_capacity(parsed.len());
    let mut pa = Vec::with_capacity(parsed.len());
    for v in parsed {
        match v {
            TypedValue::Score { result: r, points_for, points_against } => {
                result.push(r.map(|c| TypedValue::text(c.to_string())).unwrap_or(TypedValue::Empty));
                pf.push(TypedValue::number(*points_for as f64));
                pa.push(TypedValue::number(*points_against as f64));
            }
            _ => {
                result.push(TypedValue::Empty);
                pf.push(TypedValue::Empty);
                pa.push(TypedValue::Empty);
            }
        }
    }
    let part = |p: usize| Some(ColumnOrigin { source: k, part: Some(p) });
    vec![
        ComprehendedColumn {
            id: ColumnId(format!("c{k}_result")),
            name: format!("{name} result"),
            role: ColumnRole::Dimension,
            values: result,
            origin: part(0),
        },
        ComprehendedColumn {
            id: ColumnId(format!("c{k}_for")),
            name: format!("{name} for"),
            role: ColumnRole::Metric,
            values: pf,
            origin: part(1),
        },
        ComprehendedColumn {
            id: ColumnId(format!("c{k}_against")),
            name: format!("{name} against"),
            role: ColumnRole::Metric,
            values: pa,
            origin: part(2),
        },
    ]
}

/// A Total row is recognized by its first non-empty cell.
fn is_total_row(row: &[String]) -> bool {
    row.iter()
        .map(|c| c.trim())
        .find(|c| !c.is_empty())
        .map(|c| TOTAL_MARKERS.contains(&c.to_lowercase().as_str()))
        .unwrap_or(false)
}
