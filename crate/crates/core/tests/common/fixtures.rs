use std::path::{Path, PathBuf};

use tabqa_core::engine::{Engine, EngineConfig};
use tabqa_core::eval::{build_training_corpus, load_dataset};
use tabqa_core::predictor::{train, AbductionMode, PredictorModel, TrainConfig};

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn table_path(name: &str) -> PathBuf {
    fixture_dir().join("tables").join(format!("{name}.csv"))
}

/// The small dataset in the published directory layout.
pub fn mini_dataset() -> PathBuf {
    fixture_dir().join("wtq")
}

/// Operand model trained on counter-factual labels from the small
/// dataset's training split.
pub fn fixture_model() -> PredictorModel {
    let root = mini_dataset();
    let examples = load_dataset(&root, "train").expect("fixture dataset");
    let engine = Engine::new(EngineConfig::with_abduction(AbductionMode::Baseline)).unwrap();
    let corpus = build_training_corpus(&engine, &examples, &root);
    train(&corpus.examples, &TrainConfig::default()).expect("fixture corpus is non-empty")
}

pub fn ml_engine() -> Engine {
    Engine::with_model(EngineConfig::with_abduction(AbductionMode::Ml), Some(fixture_model())).unwrap()
}

pub struct RegressionCase {
    pub table: String,
    pub question: String,
    pub question_type: String,
    pub answer: Vec<String>,
}

pub fn regression_cases() -> Vec<RegressionCase> {
    let text = std::fs::read_to_string(fixture_dir().join("regression.tsv")).unwrap();
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            RegressionCase {
                table: f[0].into(),
                question: f[1].into(),
                question_type: f[2].into(),
                answer: f[3].split('|').map(str::to_string).collect(),
            }
        })
        .collect()
}
