use super::*;
use crate::grammar::{Aggregation, Comparator, Direction, Filter, Operand, OperandSource, SemanticParse};
use crate::oracle::oracle_execute;
use crate::table::{comprehend, ColumnId};
use crate::test_support::*;

fn id(s: &str) -> ColumnId {
    ColumnId::new(s)
}

fn op(column: &str, headword: bool) -> Operand {
    Operand { column: id(column), source: OperandSource::Annotation { index: 0 }, headword }
}

fn eq(column: &str, value: &str) -> Filter {
    Filter::Equals { column: id(column), value: value.into(), source: 0 }
}

fn run(parse: &SemanticParse, table: &crate::table::ComprehendedTable) -> ResultSet {
    let plan = build_plan(parse, table).unwrap();
    let r = execute(&plan, table);
    assert_eq!(r, oracle_execute(&plan, table), "oracle disagrees on {plan:?}");
    r
}

#[test]
fn running_example_plan() {
    let table = actor_table();
    let parse = SemanticParse {
        question_type: Some(QuestionType::Lookup),
        dimensions: vec![op("c1", true)],
        filters: vec![eq("c3", "also producer"), eq("c4", "barton")],
        ..Default::default()
    };
    let plan = build_plan(&parse, &table).unwrap();
    assert!(plan.inner.is_none());
    assert_eq!(plan.outer.output, Output::Rows { column: id("c1") });
    let r = run(&parse, &table);
    assert_eq!(r.rendered(), vec!["Pink Sky"]);
    assert_eq!(r.values[0].cells, vec![CellRef { column: id("c1"), row: 3 }]);
    assert_eq!(
        to_sql(&plan, &table),
        "SELECT DISTINCT \"Title\" FROM \"actor\" WHERE \"Notes\" = 'also producer' AND \"Actor\" = 'barton'"
    );
}

#[test]
fn missing_dimension_is_a_plan_error() {
    let parse = SemanticParse {
        question_type: Some(QuestionType::Lookup),
        filters: vec![eq("c3", "also producer")],
        ..Default::default()
    };
    let err = build_plan(&parse, &actor_table()).unwrap_err();
    assert!(err.to_string().contains("dimension"), "{err}");
}

#[test]
fn count_with_a_comparison() {
    let table = comprehend(&raw("t", &["Name", "Wins"], &[&["a", "3"], &["b", "7"], &["c", "12"]]));
    let plan = QueryPlan {
        table: "t".into(),
        question_type: QuestionType::HowMany,
        inner: None,
        outer: Stage {
            predicates: vec![Predicate::Compare { column: id("c1_num"), op: Comparator::Gt, bound: 5.0 }],
            ..Stage::project(id("c0"))
        },
    };
    assert_eq!(execute(&plan, &table).values.len(), 2);
    let parse = SemanticParse {
        question_type: Some(QuestionType::HowMany),
        metrics: vec![op("row_id", false)],
        filters: vec![Filter::Compare { column: id("c1_num"), op: Comparator::Gt, bound: 5.0, sources: vec![] }],
        aggregation: Some(Aggregation::Count),
        ..Default::default()
    };
    assert_eq!(run(&parse, &table).rendered(), vec!["2"]);
}

#[test]
fn sums_skip_the_total_row() {
    let table = medal_table();
    let parse = SemanticParse {
        question_type: Some(QuestionType::HowMany),
        metrics: vec![op("c2_num", false)],
        aggregation: Some(Aggregation::Count),
        ..Default::default()
    };
    let total_row = table.total_rows[0];
    let total_cell = table.value(&id("c2_num"), total_row).unwrap().as_number().unwrap();
    let r = run(&parse, &table);
    assert_eq!(r.values[0].value.as_number(), Some(total_cell));
}

#[test]
fn absent_value_gives_no_answer() {
    let table = actor_table();
    let parse = SemanticParse {
        question_type: Some(QuestionType::Lookup),
        dimensions: vec![op("c1", true)],
        filters: vec![eq("c4", "nobody")],
        ..Default::default()
    };
    let r = run(&parse, &table);
    assert!(r.is_empty());
    assert!(normalize_answer(&r, QuestionType::Lookup, false).value.is_none());
}

#[test]
fn same_number_of_bronze_medals_as_peru() {
    let table = medal_table();
    let parse = SemanticParse {
        question_type: Some(QuestionType::SameValue),
        dimensions: vec![op("c1", true), op("c4", false)],
        filters: vec![eq("c1", "peru")],
        ..Default::default()
    };
    let plan = build_plan(&parse, &table).unwrap();
    assert!(plan.inner.is_some());
    assert_eq!(run(&parse, &table).rendered(), vec!["Argentina", "Colombia"]);
}

#[test]
fn difference_of_two_rows() {
    let table = medal_table();
    let parse = SemanticParse {
        question_type: Some(QuestionType::Difference),
        metrics: vec![op("c2_num", false)],
        filters: vec![eq("c1", "brazil"), eq("c1", "peru")],
        aggregation: Some(Aggregation::Difference),
        ..Default::default()
    };
    let r = run(&parse, &table);
    assert_eq!(r.rendered(), vec!["3"]);
    assert_eq!(r.values[0].cells.len(), 2);
}

#[test]
fn a_or_b_by_sorted_metric() {
    let table = medal_table();
    let parse = SemanticParse {
        question_type: Some(QuestionType::AOrB),
        metrics: vec![op("c3_num", false)],
        filters: vec![eq("c1", "chile"), eq("c1", "brazil")],
        sort: Some(Direction::Desc),
        ..Default::default()
    };
    assert_eq!(run(&parse, &table).rendered(), vec!["Chile"]);
}

#[test]
fn a_or_b_both_qualify() {
    let table = medal_table();
    let parse = SemanticParse {
        question_type: Some(QuestionType::AOrB),
        filters: vec![
            eq("c1", "peru"),
            eq("c1", "argentina"),
            Filter::Compare { column: id("c4_num"), op: Comparator::Eq, bound: 3.0, sources: vec![] },
        ],
        ..Default::default()
    };
    let r = run(&parse, &table);
    let a = normalize_answer(&r, QuestionType::AOrB, false);
    assert_eq!(a.value.strings(), vec!["Argentina", "Peru"]);
}

#[test]
fn before_and_after_anchor() {
    let table = actor_table();
    let mut parse = SemanticParse {
        question_type: Some(QuestionType::BefAfter),
        filters: vec![Filter::Position {
            relation: crate::grammar::Relation::Before,
            column: id("c1"),
            value: "octane".into(),
            sources: vec![],
        }],
        ..Default::default()
    };
    assert_eq!(run(&parse, &table).rendered(), vec!["Notting Hill"]);
    if let Filter::Position { relation, value, .. } = &mut parse.filters[0] {
        *relation = crate::grammar::Relation::After;
        *value = "homecoming".into();
    }
    assert!(run(&parse, &table).is_empty());
}

#[test]
fn first_and_last_use_the_date_column() {
    let table = actor_table();
    let parse = SemanticParse {
        question_type: Some(QuestionType::FirstLast),
        dimensions: vec![op("c1", true)],
        filters: vec![eq("c4", "roberts")],
        ordinal: Some(crate::grammar::Ordinal::First),
        ..Default::default()
    };
    let plan = build_plan(&parse, &table).unwrap();
    assert_eq!(plan.outer.order.as_ref().unwrap().column, id("c0_date"));
    assert_eq!(run(&parse, &table).rendered(), vec!["Silent Hour"]);
}

#[test]
fn both_filters_share_a_value() {
    let table = city_table();
    let parse = SemanticParse {
        question_type: Some(QuestionType::PosBoth),
        dimensions: vec![op("c1", true)],
        filters: vec![eq("c0", "los angeles"), eq("c0", "san francisco")],
        ..Default::default()
    };
    assert_eq!(run(&parse, &table).rendered(), vec!["California"]);
}

#[test]
fn sort_variants() {
    let table = film_table();
    let dim = SemanticParse {
        question_type: Some(QuestionType::SortDim),
        dimensions: vec![op("c0", true)],
        metrics: vec![op("c3_num", false)],
        sort: Some(Direction::Asc),
        ..Default::default()
    };
    assert_eq!(run(&dim, &table).rendered(), vec!["Paper Moon"]);
    let met = SemanticParse { question_type: Some(QuestionType::SortMet), dimensions: vec![], sort: Some(Direction::Desc), ..dim };
    assert_eq!(run(&met, &table).rendered(), vec!["40"]);
}

#[test]
fn answer_normalization() {
    let v = |s: &str, row| ResultValue { value: crate::table::TypedValue::text(s), cells: vec![CellRef { column: id("c1"), row }] };
    let three = ResultSet { values: vec![v("a", 0), v("b", 1), v("c", 2)] };
    let plural = normalize_answer(&three, QuestionType::Lookup, true);
    assert_eq!(plural.value.strings(), vec!["a", "b", "c"]);
    assert_eq!(plural.cells.len(), 3);
    let single = normalize_answer(&three, QuestionType::Lookup, false);
    assert_eq!(single.value, AnswerValue::Scalar(crate::table::TypedValue::text("a")));
    assert!(normalize_answer(&ResultSet::default(), QuestionType::HowMany, false).value.is_none());
}

#[test]
fn plans_reject_unknown_columns_and_stray_nesting() {
    let table = actor_table();
    let plan = QueryPlan {
        table: "actor".into(),
        question_type: QuestionType::Lookup,
        inner: None,
        outer: Stage { predicates: vec![Predicate::InInner { column: id("c1") }], ..Stage::project(id("c1")) },
    };
    assert!(plan.validate(&table).is_err());
    let plan = QueryPlan { outer: Stage::project(id("c99")), ..plan };
    assert!(plan.validate(&table).is_err());
}
