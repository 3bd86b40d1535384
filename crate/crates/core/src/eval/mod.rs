//! Evaluation over the question/answer dataset: loading, answer matching,
//! accuracy reports and corpus statistics.

mod census;
mod corpus;
mod dataset;
mod matching;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

pub use census::{association_census, read_header, yes_no_census, AssociationCensus, YesNoCensus};
pub use corpus::{build_training_corpus, TrainingCorpus};
pub use dataset::{load_dataset, load_dataset_with, parse_examples, DatasetLayout, EvalExample, SplitSpec, LAYOUT_FILE};
pub use matching::{answer_match, normalize_answer_text};

use crate::engine::{Engine, EngineConfig, PreparedTable, TermKind};
use crate::error::Result;
use crate::predictor::AbductionMode;

/// Bucket for examples that produced no typed candidate.
pub const UNTYPED: &str = "NONE";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExampleOutcome {
    pub id: String,
    pub question_type: String,
    pub correct: bool,
    pub predicted: Vec<String>,
    pub gold: Vec<String>,
    pub candidates: usize,
    pub abduced: bool,
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TypeCount {
    pub total: usize,
    pub correct: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub abduction: AbductionMode,
    pub model: Option<String>,
    pub total: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub by_type: BTreeMap<String, TypeCount>,
    pub average_candidates: f64,
    /// Unmatched question terms, most frequent first.
    pub unmatched_terms: Vec<(String, usize)>,
    pub abduction_used: usize,
    pub errors: usize,
    pub examples: Vec<ExampleOutcome>,
}

impl EvalReport {
    fn from_outcomes(engine: &Engine, examples: Vec<ExampleOutcome>, unmatched: Vec<Vec<String>>) -> Self {
        let total = examples.len();
        let correct = examples.iter().filter(|e| e.correct).count();
        let mut by_type: BTreeMap<String, TypeCount> = BTreeMap::new();
        for e in &examples {
            let c = by_type.entry(e.question_type.clone()).or_default();
            c.total += 1;
            c.correct += usize::from(e.correct);
        }
        let mut freq: HashMap<String, usize> = HashMap::new();
        for t in unmatched.into_iter().flatten() {
            *freq.entry(t).or_default() += 1;
        }
        let mut unmatched_terms: Vec<(String, usize)> = freq.into_iter().collect();
        unmatched_terms.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let ratio = |n: usize| if total == 0 { 0.0 } else { n as f64 / total as f64 };
        EvalReport {
            abduction: engine.config.abduction,
            model: engine.config.model_path.as_ref().map(|p| p.display().to_string()),
            total,
            correct,
            accuracy: ratio(correct),
            by_type,
            average_candidates: ratio(examples.iter().map(|e| e.candidates).sum()),
            unmatched_terms,
            abduction_used: examples.iter().filter(|e| e.abduced).count(),
            errors: examples.iter().filter(|e| e.error.is_some()).count(),
            examples,
        }
    }

    /// One row per example.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("id\ttype\tcorrect\tpredicted\tgold\tcandidates\tabduced\terror\n");
        for e in &self.examples {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                e.id,
                e.question_type,
                e.correct,
                e.predicted.join("|").replace(['\t', '\n'], " "),
                e.gold.join("|").replace(['\t', '\n'], " "),
                e.candidates,
                e.abduced,
                e.error.as_deref().unwrap_or("").replace(['\t', '\n'], " ")
            );
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "abduction        {:?}", self.abduction);
        if let Some(m) = &self.model {
            let _ = writeln!(s, "model            {m}");
        }
        let _ = writeln!(s, "examples         {}", self.total);
        let _ = writeln!(s, "correct          {}", self.correct);
        let _ = writeln!(s, "accuracy         {:.2}%", self.accuracy * 100.0);
        let _ = writeln!(s, "avg candidates   {:.2}", self.average_candidates);
        let _ = writeln!(s, "abduction used   {}", self.abduction_used);
        let _ = writeln!(s, "errors           {}", self.errors);
        let _ = writeln!(s, "\n{:<12} {:>7} {:>7} {:>8}", "type", "total", "correct", "accuracy");
        for (t, c) in &self.by_type {
            let acc = if c.total == 0 { 0.0 } else { 100.0 * c.correct as f64 / c.total as f64 };
            let _ = writeln!(s, "{t:<12} {:>7} {:>7} {acc:>7.2}%", c.total, c.correct);
        }
        let _ = writeln!(s, "\nfrequent unmatched terms");
        for (t, n) in self.unmatched_terms.iter().take(20) {
            let _ = writeln!(s, "  {n:>6}  {t}");
        }
        s
    }
}

/// Load every distinct table of `examples` once.
pub fn load_tables(engine: &Engine, examples: &[EvalExample], root: &Path) -> HashMap<String, std::result::Result<PreparedTable, String>> {
    let mut names: Vec<&str> = examples.iter().map(|e| e.table.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    names
        .into_par_iter()
        .map(|n| (n.to_string(), engine.load_table(&root.join(n)).map_err(|e| e.to_string())))
        .collect()
}

/// Run the pipeline configured by `config` on every example.
pub fn evaluate(config: &EngineConfig, examples: &[EvalExample], root: &Path) -> Result<EvalReport> {
    Ok(evaluate_with(&Engine::new(config.clone())?, examples, root))
}

/// Per-example failures count as incorrect answers.
pub fn evaluate_with(engine: &Engine, examples: &[EvalExample], root: &Path) -> EvalReport {
    let tables = load_tables(engine, examples, root);
    let (outcomes, unmatched): (Vec<_>, Vec<_>) = examples
        .par_iter()
        .map(|ex| {
            let mut out = ExampleOutcome {
                id: ex.id.clone(),
                question_type: UNTYPED.to_string(),
                correct: false,
                predicted: Vec::new(),
                gold: ex.gold.clone(),
                candidates: 0,
                abduced: false,
                error: None,
            };
            let table = match &tables[&ex.table] {
                Ok(t) => t,
                Err(e) => {
                    out.error = Some(e.clone());
                    return (out, Vec::new());
                }
            };
            match engine.answer(&ex.question, table) {
                Ok(r) => {
                    out.candidates = r.candidates.len();
                    out.abduced = r.abduced();
                    if let Some(t) = r.question_type() {
                        out.question_type = t.id().to_string();
                    }
                    out.predicted = r.answer.value.strings();
                    out.correct = answer_match(&out.predicted, &ex.gold);
                    let unmatched = r
                        .interpretation
                        .terms
                        .iter()
                        .filter(|t| t.kind == TermKind::Unmatched)
                        .map(|t| t.term.to_lowercase())
                        .collect();
                    (out, unmatched)
                }
                Err(e) => {
                    out.error = Some(e.to_string());
                    (out, Vec::new())
                }
            }
        })
        .unzip();
    EvalReport::from_outcomes(engine, outcomes, unmatched)
}
