//! Training corpus for the operand model, built from a dataset split by
//! counter-factual execution.

use std::collections::HashMap;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::{load_tables, EvalExample};
use crate::engine::Engine;
use crate::predictor::{generate_training_data, verify_example, CorpusItem, TrainingExample};

#[derive(Clone, Debug, Serialize)]
pub struct TrainingCorpus {
    pub questions: usize,
    /// Questions whose best candidate lacks an operand.
    pub incomplete: usize,
    pub examples: Vec<TrainingExample>,
    /// Emitted examples whose label the reference evaluator does not confirm.
    pub violations: usize,
}

pub fn build_training_corpus(engine: &Engine, examples: &[EvalExample], root: &Path) -> TrainingCorpus {
    let tables = load_tables(engine, examples, root);
    let items: Vec<CorpusItem> = examples
        .par_iter()
        .filter_map(|ex| {
            let t = tables.get(&ex.table)?.as_ref().ok()?;
            engine.corpus_item(Some(ex.id.clone()), &ex.question, t, ex.gold.clone())
        })
        .collect();
    let generated = generate_training_data(&items);
    let by_id: HashMap<&str, &CorpusItem> =
        items.iter().filter_map(|i| Some((i.question_id.as_deref()?, i))).collect();
    let violations = generated
        .par_iter()
        .filter(|e| {
            let item = e.question_id.as_deref().and_then(|id| by_id.get(id));
            !item.is_some_and(|i| verify_example(i, e))
        })
        .count();
    TrainingCorpus { questions: examples.len(), incomplete: items.len(), examples: generated, violations }
}
