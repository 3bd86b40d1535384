use serde::Serialize;

use crate::annotate::{AnnotatedQuery, Annotation, AnnotationTarget, MatchKind};
use crate::grammar::{AbductionMethod, OperandSource, SemanticParse};
use crate::predictor::AbductionOutcome;
use crate::question_typer::{MissingOperandReport, MissingSlot, OperandKind};
use crate::table::{format_number, ColumnId, ComprehendedTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TermKind {
    Exact,
    Approximate,
    MachineLearntAbductive,
    RuleBasedAbductive,
    Stopword,
    Unmatched,
}

impl TermKind {
    pub fn is_doubtful(self) -> bool {
        matches!(self, TermKind::Approximate | TermKind::MachineLearntAbductive | TermKind::RuleBasedAbductive)
    }
}

/// A run of question tokens and how it was understood.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermEntry {
    pub term: String,
    pub start: usize,
    pub len: usize,
    pub kind: TermKind,
    pub match_kind: Option<MatchKind>,
    pub target: Option<String>,
    pub confidence: Option<f64>,
    pub provenance: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AbducedOperand {
    pub slot: OperandKind,
    pub column: ColumnId,
    pub heading: String,
    pub method: AbductionMethod,
    pub provenance: String,
    pub confidence: Option<f64>,
    pub terms: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Interpretation {
    pub question: String,
    /// The question with spelling corrections applied and abduced operands
    /// in brackets.
    pub rewritten: String,
    /// Token runs in question order; every token appears in exactly one.
    pub terms: Vec<TermEntry>,
    pub abductions: Vec<AbducedOperand>,
    /// Operands that stayed missing when no answer could be formed.
    pub missing: Vec<MissingSlot>,
    pub parse: SemanticParse,
    pub query: Option<String>,
    pub doubt: bool,
    pub message: Option<String>,
}

fn heading(table: &ComprehendedTable, id: &ColumnId) -> String {
    table.column(id).map(|c| c.name.clone()).unwrap_or_else(|| id.to_string())
}

fn describe(a: &Annotation, table: &ComprehendedTable) -> Option<String> {
    match &a.target {
        AnnotationTarget::Column { column } => Some(format!("column {}", heading(table, column))),
        AnnotationTarget::Cell { column, value, .. } => Some(format!("cell \"{value}\" in {}", heading(table, column))),
        AnnotationTarget::Intent { intent } => Some(format!("intent {}", intent.id())),
        AnnotationTarget::Number { value } => Some(format!("number {}", format_number(*value))),
        AnnotationTarget::Placeholder => None,
    }
}

/// The abduced operands of an outcome, in fill order.
fn abduced_operands(outcome: &AbductionOutcome, table: &ComprehendedTable) -> Vec<AbducedOperand> {
    let ops: Vec<_> = outcome.parse.dimensions.iter().chain(&outcome.parse.metrics).collect();
    let mut taken = vec![false; ops.len()];
    let mut out = Vec::new();
    for (slot, column) in &outcome.filled {
        let Some(i) = (0..ops.len()).find(|&i| !taken[i] && ops[i].is_abduced() && &ops[i].column == column) else {
            continue;
        };
        taken[i] = true;
        if let OperandSource::Abduced { terms, confidence, method } = &ops[i].source {
            out.push(AbducedOperand {
                slot: *slot,
                column: column.clone(),
                heading: heading(table, column),
                method: *method,
                provenance: method.provenance().to_string(),
                confidence: *confidence,
                terms: terms.clone(),
            });
        }
    }
    out
}

/// Describe how `parse` reads the question. `outcome` is the abduction that
/// completed it, if any; `missing` the report of an unanswerable parse.
pub fn interpret(
    aq: &AnnotatedQuery,
    parse: &SemanticParse,
    outcome: Option<&AbductionOutcome>,
    table: &ComprehendedTable,
    query: Option<String>,
    missing: Option<&MissingOperandReport>,
) -> Interpretation {
    let abductions = outcome.map(|o| abduced_operands(o, table)).unwrap_or_default();
    let consumed: Vec<&Annotation> = parse.provenance.iter().filter_map(|&i| aq.annotations.get(i)).collect();

    // The abduced operand replaces the placeholder, else the first unmatched
    // term it was predicted from.
    let anchor: Option<(usize, usize)> = abductions.first().and_then(|first| {
        if let Some(a) = parse.placeholder.and_then(|i| aq.annotations.get(i)) {
            return Some((a.start, a.len));
        }
        aq.unmatched.iter().find(|&&i| first.terms.contains(&aq.tokens[i].text)).map(|&i| (i, 1))
    });

    let span_surface = |start: usize, len: usize| {
        aq.tokens[start..start + len].iter().map(|t| t.surface.as_str()).collect::<Vec<_>>().join(" ")
    };
    let mut terms = Vec::new();
    let mut rewritten = Vec::new();
    let mut i = 0;
    while i < aq.tokens.len() {
        if let (Some((start, len)), Some(first)) = (anchor, abductions.first()) {
            if start == i {
                let kind = match first.method {
                    AbductionMethod::Learned => TermKind::MachineLearntAbductive,
                    _ => TermKind::RuleBasedAbductive,
                };
                terms.push(TermEntry {
                    term: span_surface(start, len),
                    start,
                    len,
                    kind,
                    match_kind: None,
                    target: Some(format!("column {}", first.heading)),
                    confidence: first.confidence,
                    provenance: first.provenance.clone(),
                });
                rewritten.push(format!("[{}]", first.heading.to_lowercase()));
                i += len;
                continue;
            }
        }
        let used = consumed
            .iter()
            .filter(|a| a.start == i && !matches!(a.target, AnnotationTarget::Placeholder))
            .max_by_key(|a| a.len);
        if let Some(a) = used {
            let kind = if a.kind.is_approximate() { TermKind::Approximate } else { TermKind::Exact };
            let surface = span_surface(a.start, a.len);
            rewritten.push(if a.kind == MatchKind::SpellCorrected { a.key.clone() } else { surface.clone() });
            terms.push(TermEntry {
                term: surface,
                start: a.start,
                len: a.len,
                kind,
                match_kind: Some(a.kind),
                target: describe(a, table),
                confidence: None,
                provenance: a.provenance.clone(),
            });
            i += a.len;
            continue;
        }
        let t = &aq.tokens[i];
        let unmatched = aq.unmatched.contains(&i) || aq.annotations.iter().any(|a| a.covers(i));
        let (kind, provenance) = if unmatched {
            (TermKind::Unmatched, "no match used")
        } else {
            (TermKind::Stopword, "stopword")
        };
        terms.push(TermEntry {
            term: t.surface.clone(),
            start: i,
            len: 1,
            kind,
            match_kind: None,
            target: None,
            confidence: None,
            provenance: provenance.to_string(),
        });
        rewritten.push(t.surface.clone());
        i += 1;
    }

    let mut rewritten = rewritten.join(" ");
    if let Some(c) = rewritten.chars().next() {
        rewritten = c.to_uppercase().chain(rewritten.chars().skip(1)).collect();
    }
    let missing: Vec<MissingSlot> = missing.map(|m| m.missing.clone()).unwrap_or_default();
    let doubt = terms.iter().any(|t| t.kind.is_doubtful()) || !missing.is_empty();
    let message = doubt.then(|| format!("We think you meant: {rewritten}."));
    Interpretation {
        question: aq.question.clone(),
        rewritten,
        terms,
        abductions,
        missing,
        parse: parse.clone(),
        query,
        doubt,
        message,
    }
}
