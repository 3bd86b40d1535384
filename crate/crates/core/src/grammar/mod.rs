//! Semantic parses and the rule grammar that builds them from annotations.

mod parser;
mod rules;

use std::fmt;

use serde::Serialize;

pub use parser::{candidate_stats, CandidateStats, Parser, DEFAULT_BEAM, DEFAULT_MAX_CANDIDATES};
pub use rules::{Action, ActionArg, Grammar, GrammarRule, RuleMode, Terminal};

use crate::annotate::Intent;
use crate::question_typer::QuestionType;
use crate::table::ColumnId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    Gt,
    Lt,
    Ge,
    Le,
    Eq,
    Ne,
}

impl Comparator {
    pub fn from_intent(intent: Intent) -> Option<Self> {
        Some(match intent {
            Intent::CmpGt => Comparator::Gt,
            Intent::CmpLt => Comparator::Lt,
            Intent::CmpGe => Comparator::Ge,
            Intent::CmpLe => Comparator::Le,
            Intent::CmpEq => Comparator::Eq,
            Intent::CmpNe => Comparator::Ne,
            _ => return None,
        })
    }

    pub fn holds(self, a: f64, b: f64) -> bool {
        match self {
            Comparator::Gt => a > b,
            Comparator::Lt => a < b,
            Comparator::Ge => a >= b,
            Comparator::Le => a <= b,
            Comparator::Eq => a == b,
            Comparator::Ne => a != b,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Gt => ">",
            Comparator::Lt => "<",
            Comparator::Ge => ">=",
            Comparator::Le => "<=",
            Comparator::Eq => "=",
            Comparator::Ne => "<>",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Before,
    After,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Asc,
    Desc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Ordinal {
    First,
    Last,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    Count,
    Sum,
    Average,
    Difference,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerKind {
    Cell,
    List,
    Number,
    Boolean,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AbductionMethod {
    /// Predicted by the trained operand model.
    Learned,
    /// Leftmost string-valued column; used when the model is disabled.
    Baseline,
    /// The model knew none of the terms, so the baseline was used.
    OovFallback,
}

impl AbductionMethod {
    pub fn provenance(self) -> &'static str {
        match self {
            AbductionMethod::Learned => "machine-learnt abductive match",
            AbductionMethod::Baseline | AbductionMethod::OovFallback => "rule-based abductive match",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperandSource {
    /// Index into the annotated query's annotations.
    Annotation { index: usize },
    Abduced { terms: Vec<String>, confidence: Option<f64>, method: AbductionMethod },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Operand {
    pub column: ColumnId,
    pub source: OperandSource,
    /// Derived from the question's headword.
    pub headword: bool,
}

impl Operand {
    pub fn is_abduced(&self) -> bool {
        matches!(self.source, OperandSource::Abduced { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Filter {
    /// Dimension column equals a cell string.
    Equals { column: ColumnId, value: String, source: usize },
    /// Metric column compared with a number.
    Compare { column: ColumnId, op: Comparator, bound: f64, sources: Vec<usize> },
    /// The row just before or after the row holding a cell.
    Position { relation: Relation, column: ColumnId, value: String, sources: Vec<usize> },
}

impl Filter {
    pub fn column(&self) -> &ColumnId {
        match self {
            Filter::Equals { column, .. } | Filter::Compare { column, .. } | Filter::Position { column, .. } => column,
        }
    }

    pub fn sources(&self) -> Vec<usize> {
        match self {
            Filter::Equals { source, .. } => vec![*source],
            Filter::Compare { sources, .. } | Filter::Position { sources, .. } => sources.clone(),
        }
    }

    pub fn is_equals(&self) -> bool {
        matches!(self, Filter::Equals { .. })
    }

    fn structural_key(&self) -> String {
        match self {
            Filter::Equals { column, value, .. } => format!("eq({column},{value})"),
            Filter::Compare { column, op, bound, .. } => format!("cmp({column}{}{bound})", op.symbol()),
            Filter::Position { relation, column, value, .. } => format!("pos({relation:?},{column},{value})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SemanticParse {
    pub metrics: Vec<Operand>,
    pub dimensions: Vec<Operand>,
    pub filters: Vec<Filter>,
    pub sort: Option<Direction>,
    pub ordinal: Option<Ordinal>,
    pub limit: Option<u32>,
    pub aggregation: Option<Aggregation>,
    /// Intent words consumed without a slot of their own (LOOKUP, SAME, BOTH, OR).
    pub markers: Vec<Intent>,
    /// Annotation index of the consumed headword placeholder.
    pub placeholder: Option<usize>,
    pub question_type: Option<QuestionType>,
    pub answer_kind: AnswerKind,
    /// Indices of every consumed annotation, ascending.
    pub provenance: Vec<usize>,
    /// Ids of the rules applied, in application order.
    pub rules: Vec<String>,
}

impl Default for SemanticParse {
    fn default() -> Self {
        SemanticParse {
            metrics: Vec::new(),
            dimensions: Vec::new(),
            filters: Vec::new(),
            sort: None,
            ordinal: None,
            limit: None,
            aggregation: None,
            markers: Vec::new(),
            placeholder: None,
            question_type: None,
            answer_kind: AnswerKind::Cell,
            provenance: Vec::new(),
            rules: Vec::new(),
        }
    }
}

impl SemanticParse {
    pub fn is_empty(&self) -> bool {
        self.provenance.is_empty()
    }

    pub fn has_marker(&self, intent: Intent) -> bool {
        self.markers.contains(&intent)
    }

    /// Every column the parse mentions.
    pub fn columns(&self) -> Vec<&ColumnId> {
        let mut out: Vec<&ColumnId> = self.metrics.iter().map(|o| &o.column).collect();
        out.extend(self.dimensions.iter().map(|o| &o.column));
        out.extend(self.filters.iter().map(Filter::column));
        out
    }

    /// Canonical form: headword dimension first, then by column; filters and
    /// metrics by structure.
    pub fn canonicalize(&mut self) {
        self.dimensions.sort_by(|a, b| b.headword.cmp(&a.headword).then_with(|| a.column.cmp(&b.column)));
        self.metrics.sort_by(|a, b| b.headword.cmp(&a.headword).then_with(|| a.column.cmp(&b.column)));
        self.filters.sort_by_key(Filter::structural_key);
        self.markers.sort();
        self.markers.dedup();
        self.provenance.sort_unstable();
        self.provenance.dedup();
    }

    /// A string that is equal for structurally identical parses, whatever
    /// annotations they came from.
    pub fn structural_key(&self) -> String {
        let ops = |v: &[Operand]| v.iter().map(|o| o.column.as_str()).collect::<Vec<_>>().join(",");
        let filters: Vec<String> = self.filters.iter().map(Filter::structural_key).collect();
        format!(
            "m[{}] d[{}] f[{}] s{:?} o{:?} l{:?} a{:?} k{:?} p{}",
            ops(&self.metrics),
            ops(&self.dimensions),
            filters.join(";"),
            self.sort,
            self.ordinal,
            self.limit,
            self.aggregation,
            self.markers,
            self.placeholder.is_some(),
        )
    }
}

impl fmt::Display for SemanticParse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.structural_key())
    }
}
