use super::*;
use crate::table::build_knowledge_base;
use crate::test_support::actor_table;

fn annotated(q: &str) -> AnnotatedQuery {
    let kb = build_knowledge_base(&actor_table());
    annotate(q, &kb, Lexicon::default_lexicon()).unwrap()
}

fn at<'a>(aq: &'a AnnotatedQuery, word: &str) -> Vec<&'a Annotation> {
    let i = aq.tokens.iter().position(|t| t.text == word).unwrap();
    aq.annotations.iter().filter(|a| a.covers(i)).collect()
}

#[test]
fn barton_matches_cells_exactly() {
    let aq = annotated("in what movie was barton also the producer?");
    let anns = at(&aq, "barton");
    assert_eq!(anns.len(), 1);
    assert_eq!(anns[0].kind, MatchKind::Exact);
    match &anns[0].target {
        AnnotationTarget::Cell { column, rows, .. } => {
            assert_eq!(column.as_str(), "c4");
            assert_eq!(rows, &vec![0, 1, 2, 3, 4]);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn movie_is_a_placeholder_headword() {
    let aq = annotated("in what movie was barton also the producer?");
    let anns = at(&aq, "movie");
    assert_eq!(anns.len(), 1);
    assert_eq!(anns[0].target, AnnotationTarget::Placeholder);
    assert_eq!(aq.headword, Some((2, 1)));
    assert!(!aq.headword_plural);
    assert!(aq.unmatched.is_empty());
}

#[test]
fn producer_matches_the_notes_cell_through_a_stopword() {
    let aq = annotated("in what movie was barton also the producer?");
    let anns = at(&aq, "producer");
    assert_eq!(anns.len(), 1);
    assert_eq!(anns[0].key, "also producer");
    assert_eq!(anns[0].kind, MatchKind::Stem);
}

#[test]
fn lone_producer_is_a_partial_match() {
    let aq = annotated("which film was barton the producer of");
    let anns = at(&aq, "producer");
    assert_eq!(anns[0].kind, MatchKind::Partial);
    assert_eq!(anns[0].key, "also producer");
}

#[test]
fn misspelling_is_corrected() {
    let aq = annotated("in what movie was barton also the produser?");
    let anns = at(&aq, "produser");
    assert_eq!(anns.len(), 1);
    assert_eq!(anns[0].kind, MatchKind::SpellCorrected);
    assert_eq!(anns[0].key, "also producer");
}

#[test]
fn headings_match_both_twins() {
    let aq = annotated("what year was octane released");
    let cols: Vec<_> = at(&aq, "year")
        .into_iter()
        .filter_map(|a| match &a.target {
            AnnotationTarget::Column { column } => Some(column.as_str().to_string()),
            _ => None,
        })
        .collect();
    assert_eq!(cols, vec!["c0", "c0_num"]);
}

#[test]
fn comparison_words_and_numbers() {
    let aq = annotated("more than 10 wins");
    assert_eq!(aq.tokens.len(), 4);
    let first = at(&aq, "more");
    assert_eq!(first[0].target, AnnotationTarget::Intent { intent: Intent::CmpGt });
    assert_eq!(first[0].len, 2);
    assert!(at(&aq, "10").iter().any(|a| a.target == AnnotationTarget::Number { value: 10.0 }));
    assert_eq!(aq.unmatched_terms(), vec!["wins"]);
}

#[test]
fn unmatched_excludes_stopwords() {
    let aq = annotated("who won before barton");
    assert_eq!(aq.unmatched_terms(), vec!["who", "won"]);
}

#[test]
fn coverage_partition() {
    for q in [
        "in what movie was barton also the producer?",
        "how many movies did roberts act in after 2005",
        "which title is listed first",
        "what is the difference in year between octane and pink sky",
    ] {
        let aq = annotated(q);
        let lex = Lexicon::default_lexicon();
        for t in &aq.tokens {
            if lex.is_stopword(&t.text) {
                continue;
            }
            let covered = aq.is_covered(t.index);
            let listed = aq.unmatched.contains(&t.index);
            assert!(covered ^ listed, "{q}: token {}", t.text);
        }
    }
}

#[test]
fn exact_soundness() {
    let aq = annotated("what role did barton play in octane");
    for a in aq.annotations.iter().filter(|a| a.kind == MatchKind::Exact) {
        if matches!(a.target, AnnotationTarget::Column { .. } | AnnotationTarget::Cell { .. }) {
            assert_eq!(normalize(&aq.span_text(a.start, a.len)), a.key);
        }
    }
}

#[test]
fn spell_correction_respects_caps() {
    let kb = build_knowledge_base(&actor_table());
    let aq = annotate("what role did barton play in octxxe", &kb, Lexicon::default_lexicon()).unwrap();
    assert!(aq.annotations.iter().all(|a| a.kind != MatchKind::SpellCorrected));
    let aq = annotate("what role did barton play in homecomnig", &kb, Lexicon::default_lexicon()).unwrap();
    let corrected: Vec<_> = aq.annotations.iter().filter(|a| a.kind == MatchKind::SpellCorrected).collect();
    assert_eq!(corrected.len(), 1);
    assert!(strsim::levenshtein("homecomnig", &corrected[0].key) <= 2);
}

mod monotonicity {
    use proptest::prelude::*;

    use super::*;
    use crate::table::comprehend;
    use crate::test_support::raw;

    const POOL: [&str; 12] = [
        "red", "river", "red river", "blue", "stone", "blue stone", "city", "north", "producer", "also producer",
        "reed", "rivers",
    ];

    fn covered(q: &str, rows: &[Vec<String>]) -> Vec<usize> {
        let mut r = raw("t", &["Name", "Place"], &[]);
        r.rows = rows.to_vec();
        let kb = build_knowledge_base(&comprehend(&r));
        let aq = annotate(q, &kb, Lexicon::default_lexicon()).unwrap();
        (0..aq.tokens.len()).filter(|&i| aq.is_covered(i)).collect()
    }

    proptest! {
        #[test]
        fn adding_entries_never_uncovers_tokens(
            base in prop::collection::vec((0..POOL.len(), 0..POOL.len()), 1..4),
            extra in (0..POOL.len(), 0..POOL.len()),
            words in prop::collection::vec(0..POOL.len(), 1..6),
        ) {
            let row = |(a, b): (usize, usize)| vec![POOL[a].to_string(), POOL[b].to_string()];
            let rows: Vec<Vec<String>> = base.iter().copied().map(row).collect();
            let mut grown = rows.clone();
            grown.push(row(extra));
            let q = format!("which {}", words.iter().map(|&w| POOL[w]).collect::<Vec<_>>().join(" the "));
            let before = covered(&q, &rows);
            let after = covered(&q, &grown);
            for t in before {
                prop_assert!(after.contains(&t), "token {} lost in {:?}", t, q);
            }
        }
    }
}
