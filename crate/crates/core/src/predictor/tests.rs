use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::engine::{Engine, EngineConfig};
use crate::grammar::{AbductionMethod, OperandSource, SemanticParse};
use crate::question_typer::{MissingOperandReport, MissingSlot, OperandKind, QuestionType};
use crate::table::ColumnId;
use crate::test_support::*;

fn ex(terms: &[&str], columns: &[&str], correct: usize) -> TrainingExample {
    TrainingExample::new(
        terms.iter().map(|s| s.to_string()).collect(),
        columns.iter().map(|s| s.to_string()).collect(),
        correct,
    )
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// A model that maps "movie" and "film" to "title" and "who" to "actor".
fn movie_model() -> PredictorModel {
    static MODEL: std::sync::OnceLock<PredictorModel> = std::sync::OnceLock::new();
    MODEL.get_or_init(train_movie_model).clone()
}

fn train_movie_model() -> PredictorModel {
    let corpus = vec![
        ex(&["movie"], &["Title", "Role", "Notes", "Actor"], 0),
        ex(&["movie"], &["Role", "Title", "Actor"], 1),
        ex(&["film"], &["Notes", "Title"], 1),
        ex(&["who"], &["Title", "Actor", "Role"], 1),
        ex(&["who"], &["Actor", "Notes"], 0),
    ];
    let config = TrainConfig { heldout_fraction: 0.0, epochs: 400, learning_rate: 0.5, ..TrainConfig::default() };
    train(&corpus, &config).unwrap()
}

fn random_instance(rng: &mut ChaCha8Rng) -> Vec<TrainingExample> {
    const WORDS: [&str; 6] = ["movie", "who", "year", "team", "title", "name"];
    (0..rng.gen_range(1..=3))
        .map(|_| {
            let pick = |rng: &mut ChaCha8Rng, n| (0..n).map(|_| WORDS[rng.gen_range(0..WORDS.len())].to_string()).collect::<Vec<_>>();
            let n_terms = rng.gen_range(1..=3);
            let terms = pick(rng, n_terms);
            let columns: Vec<String> = (0..rng.gen_range(2..=4))
                .map(|_| {
                    let n = rng.gen_range(1..=2);
                    pick(rng, n).join(" ")
                })
                .collect();
            let correct = rng.gen_range(0..columns.len());
            TrainingExample::new(terms, columns, correct)
        })
        .collect()
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let eps = 1e-5;
    let mut worst: f64 = 0.0;
    for instance in 0..100 {
        let examples = random_instance(&mut rng);
        let mut p = TrainableEmbeddings::init(&examples, 4, 0.8, instance);
        let grad = p.gradient(&examples);
        for idx in 0..p.weights.len() {
            let (w, k) = (idx / p.dim, idx % p.dim);
            let analytic = grad.get(&w).map_or(0.0, |g| g[k]);
            let orig = p.weights[idx];
            p.weights[idx] = orig + eps;
            let up = p.loss(&examples);
            p.weights[idx] = orig - eps;
            let down = p.loss(&examples);
            p.weights[idx] = orig;
            let numeric = (up - down) / (2.0 * eps);
            let rel = (analytic - numeric).abs() / (analytic.abs() + numeric.abs()).max(1e-6);
            worst = worst.max(rel);
        }
    }
    assert!(worst <= 1e-4, "worst relative error {worst}");
}

#[test]
fn tiny_corpus_is_memorized() {
    let corpus = vec![
        ex(&["movie"], &["Title", "Year", "Role"], 0),
        ex(&["who"], &["Title", "Actor", "Role"], 1),
        ex(&["part"], &["Title", "Actor", "Role"], 2),
    ];
    let config = TrainConfig { heldout_fraction: 0.0, epochs: 400, learning_rate: 0.5, ..TrainConfig::default() };
    let model = train(&corpus, &config).unwrap();
    for e in &corpus {
        assert_eq!(predict(&model, &e.terms, &e.columns).unwrap().argmax, e.correct);
    }
    let loss = &model.metadata.train_loss;
    assert!(loss.last().unwrap() < loss.first().unwrap());
}

#[test]
fn empty_corpus_is_an_error() {
    assert!(matches!(train(&[], &TrainConfig::default()), Err(Error::NoTrainingExamples)));
}

#[test]
fn no_columns_is_an_error() {
    assert!(matches!(predict(&movie_model(), &strings(&["movie"]), &[]), Err(Error::NoColumns)));
}

#[test]
fn identical_headings_split_evenly() {
    let p = predict(&movie_model(), &strings(&["movie"]), &strings(&["Title", "Title"])).unwrap();
    assert_eq!(p.probabilities, vec![0.5, 0.5]);
}

#[test]
fn unknown_terms_give_uniform_output() {
    let p = predict(&movie_model(), &strings(&["zyzzyva"]), &strings(&["Title", "Role", "Notes"])).unwrap();
    assert_eq!(p.known_terms, 0);
    assert!(p.probabilities.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-12));
}

#[test]
fn model_round_trips_through_a_file() {
    let model = movie_model();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.bin");
    model.save(&path).unwrap();
    assert_eq!(PredictorModel::load(&path).unwrap(), model);
    std::fs::write(&path, b"not a model").unwrap();
    assert!(matches!(PredictorModel::load(&path), Err(Error::ModelFormat(_)) | Err(Error::Io(_))));
}

#[test]
fn corpus_round_trips_through_tsv() {
    let corpus = vec![ex(&["movie", "also"], &["Title", "Role"], 0), ex(&["who"], &["Year", "Actor Name"], 1)];
    let mut buf = Vec::new();
    write_corpus_tsv(&corpus, &mut buf).unwrap();
    let back = read_corpus_tsv(buf.as_slice()).unwrap();
    assert_eq!(back.len(), 2);
    for (a, b) in back.iter().zip(&corpus) {
        assert_eq!((&a.terms, &a.columns, a.correct), (&b.terms, &b.columns, b.correct));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn probabilities_form_a_distribution(
        terms in prop::collection::vec("(movie|who|film|year|zz)", 0..4),
        cols in prop::collection::vec("(Title|Role|Notes|Actor|Year|Other)", 1..6),
    ) {
        let p = predict(&movie_model(), &terms, &cols).unwrap();
        prop_assert!((p.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(p.probabilities.iter().all(|x| (0.0..=1.0).contains(x)));
    }

    #[test]
    fn permuting_columns_permutes_probabilities(
        cols in prop::collection::vec("(Title|Role|Notes|Actor|Year|Other)", 1..6),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        let model = movie_model();
        let terms = strings(&["movie", "who"]);
        let mut order: Vec<usize> = (0..cols.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let permuted: Vec<String> = order.iter().map(|&i| cols[i].clone()).collect();
        let a = predict(&model, &terms, &cols).unwrap();
        let b = predict(&model, &terms, &permuted).unwrap();
        for (j, &i) in order.iter().enumerate() {
            prop_assert!((b.probabilities[j] - a.probabilities[i]).abs() < 1e-12);
        }
    }
}

fn running_example(mode: AbductionMode, model: Option<PredictorModel>) -> AbductionOutcome {
    let engine = Engine::with_model(EngineConfig::with_abduction(mode), model).unwrap();
    let t = engine.prepare(&actor_raw());
    let item = engine
        .corpus_item(None, "in what movie was barton also the producer?", &t, strings(&["Pink Sky"]))
        .expect("incomplete top candidate");
    abduct(&item.parse, &item.report, mode, engine.model(), &t.table).unwrap()
}

#[test]
fn learned_abduction_fills_the_title() {
    let out = running_example(AbductionMode::Ml, Some(movie_model()));
    assert!(out.complete);
    assert_eq!(out.filled.len(), 1);
    let op = out.parse.dimensions.iter().find(|o| o.is_abduced()).unwrap();
    assert_eq!(op.column, ColumnId::new("c1"));
    match &op.source {
        OperandSource::Abduced { method, confidence, .. } => {
            assert_eq!(*method, AbductionMethod::Learned);
            assert!(confidence.unwrap() > 0.5);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn baseline_abduction_takes_the_leftmost_string_column() {
    let out = running_example(AbductionMode::Baseline, None);
    assert_eq!(out.filled, vec![(OperandKind::Dimension, ColumnId::new("c1"))]);
    assert_eq!(baseline_leftmost_string(&actor_table()).unwrap(), ColumnId::new("c1"));
}

#[test]
fn abduction_off_leaves_the_parse_incomplete() {
    let out = running_example(AbductionMode::Off, None);
    assert!(!out.complete);
    assert!(out.filled.is_empty());
}

#[test]
fn ml_mode_needs_a_model() {
    let t = actor_table();
    let report = MissingOperandReport {
        question_type: QuestionType::Lookup,
        missing: vec![MissingSlot { kind: OperandKind::Dimension, count: 1 }],
        terms: strings(&["movie"]),
    };
    let r = abduct(&SemanticParse::default(), &report, AbductionMode::Ml, None, &t);
    assert!(matches!(r, Err(Error::ModelRequired)));
}

#[test]
fn several_slots_get_distinct_columns() {
    let t = actor_table();
    let report = MissingOperandReport {
        question_type: QuestionType::SameValue,
        missing: vec![MissingSlot { kind: OperandKind::Dimension, count: 2 }],
        terms: strings(&["movie", "who"]),
    };
    let model = movie_model();
    for (mode, m) in [(AbductionMode::Ml, Some(&model)), (AbductionMode::Baseline, None)] {
        let out = abduct(&SemanticParse::default(), &report, mode, m, &t).unwrap();
        assert_eq!(out.filled.len(), 2);
        assert_ne!(out.filled[0].1, out.filled[1].1);
    }
}

#[test]
fn out_of_vocabulary_terms_fall_back_to_the_baseline() {
    let t = actor_table();
    let report = MissingOperandReport {
        question_type: QuestionType::Lookup,
        missing: vec![MissingSlot { kind: OperandKind::Dimension, count: 1 }],
        terms: strings(&["zyzzyva"]),
    };
    let out = abduct(&SemanticParse::default(), &report, AbductionMode::Ml, Some(&movie_model()), &t).unwrap();
    let op = &out.parse.dimensions[0];
    assert_eq!(op.column, ColumnId::new("c1"));
    assert!(matches!(op.source, OperandSource::Abduced { method: AbductionMethod::OovFallback, confidence: None, .. }));
}

#[test]
fn counterfactual_keeps_unique_correct_columns() {
    let engine = Engine::with_model(EngineConfig::default(), None).unwrap();
    let t = engine.prepare(&actor_raw());
    let q = "in what movie was barton also the producer?";
    let item = engine.corpus_item(Some("q1".into()), q, &t, strings(&["Pink Sky"])).unwrap();
    let examples = generate_training_data(std::slice::from_ref(&item));
    assert_eq!(examples.len(), 1);
    let e = &examples[0];
    assert_eq!(e.columns[e.correct], "Title");
    assert_eq!(e.question_id.as_deref(), Some("q1"));
    assert!(verify_example(&item, e));

    // No column yields the gold answer.
    let none = engine.corpus_item(None, q, &t, strings(&["Casablanca"])).unwrap();
    assert!(generate_training_data(&[none]).is_empty());
}

#[test]
fn counterfactual_drops_ambiguous_labels() {
    // Title and Alias agree on the producer row, so two columns reproduce the gold answer.
    let raw = raw(
        "dup",
        &["Year", "Title", "Alias", "Notes", "Actor"],
        &[
            &["1995", "Lost and Found", "Lost", "", "Barton"],
            &["2003", "Pink Sky", "Pink Sky", "also producer", "Barton"],
            &["2005", "Closing Time", "Closing", "", "Barton"],
        ],
    );
    let engine = Engine::with_model(EngineConfig::default(), None).unwrap();
    let t = engine.prepare(&raw);
    let item = engine
        .corpus_item(None, "in what movie was barton also the producer?", &t, strings(&["Pink Sky"]))
        .unwrap();
    assert!(generate_training_data(&[item]).is_empty());
}
