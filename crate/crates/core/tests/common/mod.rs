#![allow(dead_code)]

mod fixtures;

#[allow(unused_imports)]
pub use fixtures::*;

use rand::seq::SliceRandom;
use rand::Rng;
use tabqa_core::engine::{Response, TermKind};
use tabqa_core::executor::{AggregateFn, OrderBy, Output, PositionStep, Predicate, QueryPlan, Stage};
use tabqa_core::grammar::{Comparator, Direction, Relation};
use tabqa_core::question_typer::QuestionType;
use tabqa_core::table::{comprehend, ColumnId, ComprehendedTable, RawTable};
use tabqa_core::text::normalize;

const NAMES: [&str; 6] = ["Alba", "Bree", "Cole", "Dane", "Esme", "Finn"];
const GROUPS: [&str; 3] = ["North", "South", "East"];

/// A table of at most `max_rows` rows with text, numeric and year columns,
/// sometimes with blanks, stray text and a Total row.
pub fn random_table(rng: &mut impl Rng, max_rows: usize) -> ComprehendedTable {
    let n = rng.gen_range(1..=max_rows);
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let score = match rng.gen_range(0..20) {
            0 => String::new(),
            1 => "n/a".to_string(),
            _ => rng.gen_range(0..15).to_string(),
        };
        rows.push(vec![
            NAMES.choose(rng).unwrap().to_string(),
            GROUPS.choose(rng).unwrap().to_string(),
            score,
            rng.gen_range(1990..2000).to_string(),
        ]);
    }
    if rng.gen_bool(0.2) {
        rows.push(vec!["Total".into(), String::new(), "99".into(), String::new()]);
    }
    let header = ["Name", "Group", "Score", "Year"].iter().map(|s| s.to_string()).collect();
    comprehend(&RawTable::new("random", header, rows))
}

fn pick_column(rng: &mut impl Rng, table: &ComprehendedTable) -> ColumnId {
    table.columns.choose(rng).unwrap().id.clone()
}

fn numeric_columns(table: &ComprehendedTable) -> Vec<ColumnId> {
    table.columns.iter().filter(|c| !c.is_dimension()).map(|c| c.id.clone()).collect()
}

fn random_predicate(rng: &mut impl Rng, table: &ComprehendedTable, with_inner: bool, depth: usize) -> Predicate {
    let choice = rng.gen_range(0..if depth > 0 { 3 } else { 6 });
    match choice {
        0 | 1 => {
            let column = if rng.gen_bool(0.5) { ColumnId::new("c0") } else { ColumnId::new("c1") };
            let pool: Vec<&str> = NAMES.iter().chain(GROUPS.iter()).copied().collect();
            Predicate::Equals { column, value: normalize(pool.choose(rng).unwrap()) }
        }
        2 => {
            let numeric = numeric_columns(table);
            let ops = [Comparator::Gt, Comparator::Lt, Comparator::Ge, Comparator::Le, Comparator::Eq, Comparator::Ne];
            let column = numeric.choose(rng).unwrap().clone();
            let bound = if column.as_str().ends_with("_date") {
                rng.gen_range(1990..2000) as f64 * 10_000.0
            } else if column.as_str() == "c3_num" {
                rng.gen_range(1990..2000) as f64
            } else {
                rng.gen_range(0..15) as f64
            };
            Predicate::Compare { column, op: *ops.choose(rng).unwrap(), bound }
        }
        3 => Predicate::Any { of: (0..2).map(|_| random_predicate(rng, table, with_inner, depth + 1)).collect() },
        4 => Predicate::Not { inner: Box::new(random_predicate(rng, table, with_inner, depth + 1)) },
        _ if with_inner => Predicate::InInner { column: pick_column(rng, table) },
        _ => random_predicate(rng, table, with_inner, depth + 1),
    }
}

fn random_stage(rng: &mut impl Rng, table: &ComprehendedTable, with_inner: bool) -> Stage {
    let predicates = (0..rng.gen_range(0..3)).map(|_| random_predicate(rng, table, with_inner, 0)).collect();
    let position = rng.gen_bool(0.2).then(|| PositionStep {
        relation: if rng.gen_bool(0.5) { Relation::Before } else { Relation::After },
        anchor: random_predicate(rng, table, with_inner, 1),
    });
    let order = rng.gen_bool(0.4).then(|| OrderBy {
        column: numeric_columns(table).choose(rng).unwrap().clone(),
        direction: if rng.gen_bool(0.5) { Direction::Asc } else { Direction::Desc },
    });
    let limit = rng.gen_bool(0.3).then(|| rng.gen_range(0..4));
    let funcs = [
        AggregateFn::Count,
        AggregateFn::CountDistinct,
        AggregateFn::Sum,
        AggregateFn::Average,
        AggregateFn::Max,
        AggregateFn::Min,
    ];
    let output = match rng.gen_range(0..if with_inner { 4 } else { 3 }) {
        0 => Output::Rows { column: pick_column(rng, table) },
        1 => Output::Aggregate { func: *funcs.choose(rng).unwrap(), column: pick_column(rng, table) },
        2 => Output::SelectEach {
            column: pick_column(rng, table),
            selectors: (0..2).map(|_| random_predicate(rng, table, with_inner, 1)).collect(),
        },
        _ => Output::AbsDifference,
    };
    Stage { predicates, position, order, limit, distinct: rng.gen_bool(0.5), output }
}

pub fn random_plan(rng: &mut impl Rng, table: &ComprehendedTable) -> QueryPlan {
    let inner = rng.gen_bool(0.4).then(|| random_stage(rng, table, false));
    let outer = random_stage(rng, table, inner.is_some());
    QueryPlan { table: table.name.clone(), question_type: QuestionType::OtherType, inner, outer }
}

/// Term → heading associations planted in the synthetic corpus.
pub const PLANTED: [(&str, &str); 5] = [
    ("movie", "Title"),
    ("who", "Name"),
    ("when", "Date"),
    ("where", "Venue"),
    ("club", "Team"),
];

const DISTRACTOR_HEADINGS: [&str; 7] = ["Notes", "Rank", "Points", "Result", "Country", "Role", "Score"];
const NOISE_TERMS: [&str; 8] = ["first", "last", "year", "did", "most", "before", "only", "also"];

/// `n` examples each pairing one planted term (plus a noise word) with 3-6
/// headings that include its planted heading at a random position.
pub fn planted_corpus(rng: &mut impl Rng, n: usize) -> Vec<tabqa_core::predictor::TrainingExample> {
    (0..n)
        .map(|_| {
            let (term, heading) = PLANTED[rng.gen_range(0..PLANTED.len())];
            let mut pool: Vec<&str> = DISTRACTOR_HEADINGS
                .iter()
                .copied()
                .chain(PLANTED.iter().map(|p| p.1).filter(|h| *h != heading))
                .collect();
            pool.shuffle(rng);
            let k = rng.gen_range(2..=5);
            let mut columns: Vec<String> = pool[..k].iter().map(|s| s.to_string()).collect();
            let correct = rng.gen_range(0..=k);
            columns.insert(correct, heading.to_string());
            let terms = vec![term.to_string(), NOISE_TERMS.choose(rng).unwrap().to_string()];
            tabqa_core::predictor::TrainingExample::new(terms, columns, correct)
        })
        .collect()
}

/// Independent reference predictor: count, over the training examples, how
/// often each term co-occurs with each correct heading, and pick the
/// candidate with the highest total count (first on ties).
pub fn frequency_oracle(
    train: &[tabqa_core::predictor::TrainingExample],
) -> impl Fn(&tabqa_core::predictor::TrainingExample) -> usize {
    let mut counts: std::collections::HashMap<(String, String), usize> = std::collections::HashMap::new();
    for e in train {
        for t in &e.terms {
            *counts.entry((t.to_lowercase(), e.columns[e.correct].to_lowercase())).or_default() += 1;
        }
    }
    move |e| {
        let mut best = (0, 0usize);
        for (i, c) in e.columns.iter().enumerate() {
            let s: usize = e
                .terms
                .iter()
                .map(|t| counts.get(&(t.to_lowercase(), c.to_lowercase())).copied().unwrap_or(0))
                .sum();
            if s > best.1 {
                best = (i, s);
            }
        }
        best.0
    }
}

/// Left-most column, the table-order baseline on a synthetic example.
pub fn leftmost(_: &tabqa_core::predictor::TrainingExample) -> usize {
    0
}

pub fn accuracy(
    examples: &[tabqa_core::predictor::TrainingExample],
    f: impl Fn(&tabqa_core::predictor::TrainingExample) -> usize,
) -> f64 {
    examples.iter().filter(|e| f(e) == e.correct).count() as f64 / examples.len().max(1) as f64
}

/// Every question token lies in exactly one interpretation term, and doubt
/// is raised exactly when a non-exact match was used.
pub fn transparency_violation(r: &Response, n_tokens: usize) -> Option<String> {
    let mut seen = vec![0; n_tokens];
    for t in &r.interpretation.terms {
        for s in seen.iter_mut().skip(t.start).take(t.len) {
            *s += 1;
        }
    }
    if seen.iter().any(|&c| c != 1) {
        return Some(format!("token coverage {seen:?}"));
    }
    let non_exact = r.interpretation.terms.iter().any(|t| {
        matches!(t.kind, TermKind::Approximate | TermKind::MachineLearntAbductive | TermKind::RuleBasedAbductive)
    });
    if r.interpretation.doubt != non_exact {
        return Some(format!("doubt {} with non-exact {non_exact}", r.interpretation.doubt));
    }
    if r.interpretation.abductions.iter().any(|a| a.terms.is_empty() && a.confidence.is_none() && a.provenance.is_empty()) {
        return Some("abduction without provenance".into());
    }
    None
}
