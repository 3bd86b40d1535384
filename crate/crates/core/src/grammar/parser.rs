//! Beam search over annotation consumptions. Each annotated span is either
//! consumed by one rule application or skipped; conflicting applications fork
//! into separate candidates.

use std::collections::HashSet;

use serde::Serialize;

use super::rules::{Action, ActionArg, Grammar, RuleMode, Terminal};
use super::{Aggregation, Comparator, Filter, Operand, OperandSource, SemanticParse};
use crate::annotate::{AnnotatedQuery, Annotation, AnnotationTarget, Intent, Lexicon};
use crate::scorer::{rank, score_annotations, ScoreBreakdown, Weights};
use crate::table::{ColumnId, ColumnRole, ComprehendedTable};

pub const DEFAULT_BEAM: usize = 256;
pub const DEFAULT_MAX_CANDIDATES: usize = 64;
/// Cap on multi-constituent floating matches per rule.
const MAX_FLOATING_MATCHES: usize = 512;
const MAX_LIMIT: f64 = 1000.0;

#[derive(Clone, Debug)]
pub struct Parser {
    pub grammar: Grammar,
    pub weights: Weights,
    pub beam_width: usize,
    pub max_candidates: usize,
    /// Stopwords allowed between the constituents of an ordered rule.
    pub lexicon: Lexicon,
}

impl Default for Parser {
    fn default() -> Self {
        Parser::new(Grammar::default_grammar().clone(), Weights::default_weights().clone())
    }
}

/// One rule application over specific annotations.
#[derive(Clone, Debug)]
struct Item {
    rule: usize,
    annotations: Vec<usize>,
    tokens: Vec<usize>,
    contributions: Vec<Contribution>,
}

#[derive(Clone, Debug)]
enum Contribution {
    Filter(Filter),
    Dimension(Operand),
    Metric(Operand),
    Placeholder(usize),
    Sort(super::Direction),
    Ordinal(super::Ordinal),
    Aggregation(Aggregation),
    Limit(u32),
    Marker(Intent),
}

#[derive(Clone)]
struct State {
    draft: SemanticParse,
    consumed: Vec<bool>,
}

impl Parser {
    pub fn new(grammar: Grammar, weights: Weights) -> Self {
        Parser {
            grammar,
            weights,
            beam_width: DEFAULT_BEAM,
            max_candidates: DEFAULT_MAX_CANDIDATES,
            lexicon: Lexicon::default_lexicon().clone(),
        }
    }

    /// Ranked candidates, best first.
    pub fn parse(&self, aq: &AnnotatedQuery, table: &ComprehendedTable) -> Vec<SemanticParse> {
        self.parse_scored(aq, table).into_iter().map(|(p, _)| p).collect()
    }

    pub fn parse_scored(&self, aq: &AnnotatedQuery, table: &ComprehendedTable) -> Vec<(SemanticParse, ScoreBreakdown)> {
        if aq.annotations.is_empty() {
            return Vec::new();
        }
        let items = self.items(aq, table);
        let n = aq.tokens.len();
        let mut by_start: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, item) in items.iter().enumerate() {
            by_start[item.tokens[0]].push(i);
        }

        let mut states = vec![State { draft: SemanticParse::default(), consumed: vec![false; n] }];
        for pos in 0..n {
            let mut next = Vec::with_capacity(states.len() * 2);
            for s in states {
                if s.consumed[pos] || by_start[pos].is_empty() {
                    next.push(s);
                    continue;
                }
                for &i in &by_start[pos] {
                    let item = &items[i];
                    if item.tokens.iter().any(|&t| s.consumed[t]) {
                        continue;
                    }
                    if let Some(draft) = apply(&s.draft, item, &self.grammar) {
                        let mut consumed = s.consumed.clone();
                        for &t in &item.tokens {
                            consumed[t] = true;
                        }
                        next.push(State { draft, consumed });
                    }
                }
                next.push(s);
            }
            states = self.prune(next, aq);
        }

        let mut finals = Vec::new();
        let mut seen = HashSet::new();
        for s in states {
            let mut draft = s.draft;
            draft.canonicalize();
            if draft.is_empty() || !is_complete(&draft) {
                continue;
            }
            let extendable = items.iter().any(|item| {
                item.tokens.iter().all(|&t| !s.consumed[t])
                    && apply(&draft, item, &self.grammar).is_some_and(|d| is_complete(&d))
            });
            if extendable {
                continue;
            }
            let key = (draft.structural_key(), draft.provenance.clone());
            if seen.insert(key) {
                finals.push(draft);
            }
        }
        if finals.is_empty() {
            finals.push(SemanticParse::default());
        }

        finals.sort_by_cached_key(|p| (p.structural_key(), p.provenance.clone()));
        let mut ranked = rank(finals, aq, &self.weights);
        let mut keys = HashSet::new();
        ranked.retain(|(p, _)| keys.insert(p.structural_key()));
        ranked.truncate(self.max_candidates);
        ranked
    }

    fn prune(&self, mut states: Vec<State>, aq: &AnnotatedQuery) -> Vec<State> {
        if states.len() <= self.beam_width {
            return states;
        }
        let mut keyed: Vec<(f64, String, State)> = states
            .drain(..)
            .map(|s| {
                let score = score_annotations(s.draft.provenance.iter().map(|&i| &aq.annotations[i]), &self.weights).total;
                let bits: String = s.consumed.iter().map(|&c| if c { '1' } else { '0' }).collect();
                (score, format!("{bits}{:?}{}", s.draft.provenance, s.draft.structural_key()), s)
            })
            .collect();
        keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
        keyed.dedup_by(|a, b| a.1 == b.1);
        keyed.truncate(self.beam_width);
        keyed.into_iter().map(|(_, _, s)| s).collect()
    }

    fn items(&self, aq: &AnnotatedQuery, table: &ComprehendedTable) -> Vec<Item> {
        let terms: Vec<Vec<Terminal>> = aq.annotations.iter().map(|a| terminals(a, table)).collect();
        let has = |a: usize, t: Terminal| terms[a].contains(&t);
        let gap_is_stopwords = |from: usize, to: usize| {
            (from..to).all(|i| self.lexicon.is_stopword(&aq.tokens[i].text))
        };
        let mut items = Vec::new();
        for (ri, rule) in self.grammar.rules.iter().enumerate() {
            let mut matches: Vec<Vec<usize>> = vec![Vec::new()];
            for &t in &rule.terminals {
                let mut grown = Vec::new();
                for m in &matches {
                    for a in 0..aq.annotations.len() {
                        if !has(a, t) || m.contains(&a) {
                            continue;
                        }
                        let ann = &aq.annotations[a];
                        let fits = match rule.mode {
                            RuleMode::Ordered => match m.last() {
                                None => true,
                                Some(&p) => {
                                    let prev = &aq.annotations[p];
                                    ann.start >= prev.end() && gap_is_stopwords(prev.end(), ann.start)
                                }
                            },
                            RuleMode::Floating => m.iter().all(|&p| !overlaps(&aq.annotations[p], ann)),
                        };
                        if fits {
                            let mut next = m.clone();
                            next.push(a);
                            grown.push(next);
                        }
                    }
                    if rule.mode == RuleMode::Floating && grown.len() > MAX_FLOATING_MATCHES {
                        break;
                    }
                }
                matches = grown;
            }
            for m in matches {
                if rule.mode == RuleMode::Floating && !is_canonical_floating(&m, &rule.terminals) {
                    continue;
                }
                let Some(contributions) = resolve(&rule.actions, &m, aq, table) else { continue };
                let mut tokens: Vec<usize> =
                    m.iter().flat_map(|&a| aq.annotations[a].start..aq.annotations[a].end()).collect();
                tokens.sort_unstable();
                tokens.dedup();
                items.push(Item { rule: ri, annotations: m, tokens, contributions });
            }
        }
        items
    }
}

/// Floating matches of repeated terminals are generated in every order; keep
/// one representative.
fn is_canonical_floating(m: &[usize], terminals: &[Terminal]) -> bool {
    m.windows(2).zip(terminals.windows(2)).all(|(a, t)| t[0] != t[1] || a[0] < a[1])
}

fn overlaps(a: &Annotation, b: &Annotation) -> bool {
    a.start < b.end() && b.start < a.end()
}

fn terminals(a: &Annotation, table: &ComprehendedTable) -> Vec<Terminal> {
    match &a.target {
        AnnotationTarget::Column { column } => match table.column(column) {
            Some(c) if c.role == ColumnRole::Dimension => vec![Terminal::Dimension],
            Some(c) if c.role == ColumnRole::Metric && !c.id.is_row_id() => vec![Terminal::Metric],
            _ => Vec::new(),
        },
        AnnotationTarget::Cell { column, .. } => {
            let chronological =
                table.twins(column).iter().any(|c| matches!(c.role, ColumnRole::Date | ColumnRole::Time));
            if chronological {
                vec![Terminal::Cell]
            } else {
                vec![Terminal::Cell, Terminal::TextCell]
            }
        }
        AnnotationTarget::Intent { intent } => {
            let mut v = vec![Terminal::Intent(*intent)];
            if intent.is_comparison() {
                v.push(Terminal::Cmp);
            }
            v
        }
        AnnotationTarget::Number { .. } => vec![Terminal::Number],
        AnnotationTarget::Placeholder => vec![Terminal::Placeholder],
    }
}

/// The single date column of the table, preferring its year-number twin.
pub(crate) fn chronological_column(table: &ComprehendedTable) -> Option<(ColumnId, bool)> {
    let dates: Vec<_> = table.columns.iter().filter(|c| c.role == ColumnRole::Date).collect();
    let [date] = dates.as_slice() else { return None };
    let metric = table.twins(&date.id).into_iter().find(|c| c.role == ColumnRole::Metric);
    Some(match metric {
        Some(m) => (m.id.clone(), true),
        None => (date.id.clone(), false),
    })
}

fn resolve(actions: &[Action], m: &[usize], aq: &AnnotatedQuery, table: &ComprehendedTable) -> Option<Vec<Contribution>> {
    let ann = |k: usize| &aq.annotations[m[k]];
    let number = |k: usize| match ann(k).target {
        AnnotationTarget::Number { value } => Some(value),
        _ => None,
    };
    let column = |k: usize| match &ann(k).target {
        AnnotationTarget::Column { column } => Some(column.clone()),
        _ => None,
    };
    let cell = |k: usize| match &ann(k).target {
        AnnotationTarget::Cell { column, value, .. } => Some((column.clone(), value.clone())),
        _ => None,
    };
    let intent = |k: usize| match ann(k).target {
        AnnotationTarget::Intent { intent } => Some(intent),
        _ => None,
    };
    let operand = |k: usize| -> Option<Operand> {
        let a = ann(k);
        let headword = aq.headword.is_some_and(|(s, l)| a.start >= s && a.start < s + l);
        Some(Operand { column: column(k)?, source: OperandSource::Annotation { index: m[k] }, headword })
    };

    let mut out = Vec::with_capacity(actions.len());
    for action in actions {
        out.push(match *action {
            Action::Equals(k) => {
                let (column, value) = cell(k)?;
                Contribution::Filter(Filter::Equals { column, value, source: m[k] })
            }
            Action::Compare { op, bound, metric } => {
                let op = match op {
                    ActionArg::Ref(r) => Comparator::from_intent(intent(r)?)?,
                    ActionArg::Comparator(c) => c,
                };
                Contribution::Filter(Filter::Compare {
                    column: column(metric)?,
                    op,
                    bound: number(bound)?,
                    sources: m.to_vec(),
                })
            }
            Action::Position { relation, anchor } => {
                let (column, value) = cell(anchor)?;
                Contribution::Filter(Filter::Position { relation, column, value, sources: m.to_vec() })
            }
            Action::Chrono { op, bound } => {
                let year = number(bound)?;
                if year.fract() != 0.0 {
                    return None;
                }
                let (column, numeric) = chronological_column(table)?;
                let (op, bound_value) = match (numeric, op) {
                    (true, _) => (op, year),
                    (false, Comparator::Gt) => (Comparator::Ge, (year + 1.0) * 10_000.0),
                    (false, _) => (op, year * 10_000.0),
                };
                Contribution::Filter(Filter::Compare { column, op, bound: bound_value, sources: m.to_vec() })
            }
            Action::Dimension(k) => Contribution::Dimension(operand(k)?),
            Action::Metric(k) => Contribution::Metric(operand(k)?),
            Action::Placeholder(k) => Contribution::Placeholder(m[k]),
            Action::Sort(d) => Contribution::Sort(d),
            Action::Ordinal(o) => Contribution::Ordinal(o),
            Action::Aggregation(a) => Contribution::Aggregation(a),
            Action::Limit(k) => {
                let v = number(k)?;
                if !(1.0..=MAX_LIMIT).contains(&v) || v.fract() != 0.0 {
                    return None;
                }
                Contribution::Limit(v as u32)
            }
            Action::Marker(k) => Contribution::Marker(intent(k)?),
        });
    }
    Some(out)
}

/// Apply an item to a draft; `None` when it conflicts with a filled slot.
fn apply(draft: &SemanticParse, item: &Item, grammar: &Grammar) -> Option<SemanticParse> {
    let mut d = draft.clone();
    for c in &item.contributions {
        match c {
            Contribution::Filter(f) => {
                if !d.filters.iter().any(|g| g.structural_key() == f.structural_key()) {
                    d.filters.push(f.clone());
                }
            }
            Contribution::Dimension(o) => {
                if !d.dimensions.iter().any(|x| x.column == o.column) {
                    d.dimensions.push(o.clone());
                }
            }
            Contribution::Metric(o) => {
                if !d.metrics.iter().any(|x| x.column == o.column) {
                    d.metrics.push(o.clone());
                }
            }
            Contribution::Placeholder(i) => {
                if d.placeholder.is_some() {
                    return None;
                }
                d.placeholder = Some(*i);
            }
            Contribution::Sort(dir) => match d.sort {
                Some(s) if s != *dir => return None,
                _ => d.sort = Some(*dir),
            },
            Contribution::Ordinal(o) => match d.ordinal {
                Some(x) if x != *o => return None,
                _ => d.ordinal = Some(*o),
            },
            Contribution::Aggregation(a) => {
                d.aggregation = Some(match (d.aggregation, *a) {
                    (None, a) => a,
                    (Some(x), a) if x == a => a,
                    (Some(Aggregation::Count), Aggregation::Sum) | (Some(Aggregation::Sum), Aggregation::Count) => {
                        Aggregation::Sum
                    }
                    _ => return None,
                });
            }
            Contribution::Limit(n) => {
                if d.limit.is_some() {
                    return None;
                }
                d.limit = Some(*n);
            }
            Contribution::Marker(i) => d.markers.push(*i),
        }
    }
    d.provenance.extend(&item.annotations);
    d.provenance.sort_unstable();
    d.rules.push(grammar.rules[item.rule].id.clone());
    Some(d)
}

/// Slot constraints checked once the whole query has been consumed.
fn is_complete(d: &SemanticParse) -> bool {
    if d.aggregation == Some(Aggregation::Difference) {
        return d.filters.len() == 2 && d.filters.iter().all(Filter::is_equals);
    }
    true
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateStats {
    pub queries: usize,
    pub mean: f64,
    pub median: f64,
    pub max: usize,
    pub zero: usize,
}

/// Summary of per-query candidate counts.
pub fn candidate_stats(counts: &[usize]) -> CandidateStats {
    let mut sorted = counts.to_vec();
    sorted.sort_unstable();
    let n = sorted.len();
    let median = match n {
        0 => 0.0,
        _ if n % 2 == 1 => sorted[n / 2] as f64,
        _ => (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0,
    };
    CandidateStats {
        queries: n,
        mean: if n == 0 { 0.0 } else { sorted.iter().sum::<usize>() as f64 / n as f64 },
        median,
        max: sorted.last().copied().unwrap_or(0),
        zero: sorted.iter().filter(|&&c| c == 0).count(),
    }
}
