//! The end-to-end pipeline: comprehension, annotation, parsing, ranking,
//! typing, abduction, planning, execution and answer extraction, plus the
//! transparency payload describing how the question was understood.

mod interpret;

use std::path::{Path, PathBuf};

use serde::Serialize;

pub use interpret::{interpret, AbducedOperand, Interpretation, TermEntry, TermKind};

use crate::annotate::{annotate, AnnotatedQuery, Lexicon};
use crate::error::{Error, Result};
use crate::executor::{build_plan, execute, normalize_answer, to_sql, Answer, AnswerValue, QueryPlan, ResultSet};
use crate::grammar::{AnswerKind, Grammar, Parser, SemanticParse};
use crate::predictor::{abduct, AbductionMode, AbductionOutcome, CorpusItem, PredictorModel};
use crate::question_typer::{answer_kind, classify, find_missing, MissingOperandReport, QuestionType};
use crate::scorer::{ScoreBreakdown, Weights};
use crate::table::{
    build_knowledge_base, comprehend_with, load_csv_with, ComprehendedTable, CsvDialect, KnowledgeBase, RawTable,
    Recognizers,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EngineConfig {
    pub abduction: AbductionMode,
    pub weights_path: Option<PathBuf>,
    pub grammar_path: Option<PathBuf>,
    pub model_path: Option<PathBuf>,
    pub recognizers_path: Option<PathBuf>,
    pub intents_path: Option<PathBuf>,
    pub stopwords_path: Option<PathBuf>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            abduction: AbductionMode::Baseline,
            weights_path: None,
            grammar_path: None,
            model_path: None,
            recognizers_path: None,
            intents_path: None,
            stopwords_path: None,
        }
    }
}

impl EngineConfig {
    pub fn with_abduction(mode: AbductionMode) -> Self {
        EngineConfig { abduction: mode, ..EngineConfig::default() }
    }
}

/// A comprehended table with its knowledge base.
#[derive(Clone, Debug)]
pub struct PreparedTable {
    pub table: ComprehendedTable,
    pub kb: KnowledgeBase,
}

/// One ranked candidate as exposed to callers.
#[derive(Clone, Debug, Serialize)]
pub struct Candidate {
    pub rank: usize,
    pub parse: SemanticParse,
    pub score: ScoreBreakdown,
    pub question_type: QuestionType,
    pub missing: MissingOperandReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct Response {
    pub answer: Answer,
    pub interpretation: Interpretation,
    /// Every surviving candidate, best first.
    pub candidates: Vec<Candidate>,
    /// Rank of the candidate that produced the answer.
    pub chosen: Option<usize>,
    pub abduction: Option<AbductionOutcome>,
    pub plan: Option<QueryPlan>,
}

impl Response {
    pub fn question_type(&self) -> Option<QuestionType> {
        self.chosen.map(|i| self.candidates[i].question_type)
    }

    /// The answer used an operand the question did not name.
    pub fn abduced(&self) -> bool {
        self.abduction.as_ref().is_some_and(|a| !a.filled.is_empty())
    }
}

#[derive(Clone, Debug)]
pub struct Engine {
    pub config: EngineConfig,
    parser: Parser,
    lexicon: Lexicon,
    recognizers: Recognizers,
    model: Option<PredictorModel>,
}

fn read_config(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config {
        name: path.display().to_string(),
        line: 0,
        reason: e.to_string(),
    })
}

impl Engine {
    /// Load the configured files. ML abduction requires a model path.
    pub fn new(config: EngineConfig) -> Result<Self> {
        let model = match &config.model_path {
            Some(p) => Some(PredictorModel::load(p)?),
            None => None,
        };
        Engine::with_model(config, model)
    }

    /// As [`Engine::new`] with an in-memory model in place of the model path.
    pub fn with_model(config: EngineConfig, model: Option<PredictorModel>) -> Result<Self> {
        if config.abduction == AbductionMode::Ml && model.is_none() {
            return Err(Error::ModelRequired);
        }
        let weights = match &config.weights_path {
            Some(p) => Weights::from_config(&read_config(p)?)?,
            None => Weights::default_weights().clone(),
        };
        let grammar = match &config.grammar_path {
            Some(p) => Grammar::from_config(&read_config(p)?)?,
            None => Grammar::default_grammar().clone(),
        };
        let recognizers = match &config.recognizers_path {
            Some(p) => Recognizers::from_config(&read_config(p)?)?,
            None => Recognizers::default_set().clone(),
        };
        let lexicon = match (&config.intents_path, &config.stopwords_path) {
            (None, None) => Lexicon::default_lexicon().clone(),
            (i, s) => {
                let intents = match i {
                    Some(p) => read_config(p)?,
                    None => include_str!("../../data/intents.txt").to_string(),
                };
                let stopwords = match s {
                    Some(p) => read_config(p)?,
                    None => include_str!("../../data/stopwords.txt").to_string(),
                };
                Lexicon::from_config(&intents, &stopwords)?
            }
        };
        let mut parser = Parser::new(grammar, weights);
        parser.lexicon = lexicon.clone();
        Ok(Engine { config, parser, lexicon, recognizers, model })
    }

    pub fn model(&self) -> Option<&PredictorModel> {
        self.model.as_ref()
    }

    pub fn prepare(&self, raw: &RawTable) -> PreparedTable {
        let table = comprehend_with(raw, &self.recognizers);
        let kb = build_knowledge_base(&table);
        PreparedTable { table, kb }
    }

    /// Load a dataset table file (backslash-escaped CSV).
    pub fn load_table(&self, path: &Path) -> Result<PreparedTable> {
        Ok(self.prepare(&load_csv_with(path, CsvDialect::Backslash)?))
    }

    pub fn annotate(&self, question: &str, t: &PreparedTable) -> Result<AnnotatedQuery> {
        annotate(question, &t.kb, &self.lexicon)
    }

    /// Ranked candidates, typed. Within a group of equal score, candidates
    /// complete without abduction come first.
    pub fn candidates(&self, aq: &AnnotatedQuery, table: &ComprehendedTable) -> Vec<Candidate> {
        let mut typed: Vec<Candidate> = self
            .parser
            .parse_scored(aq, table)
            .into_iter()
            .map(|(mut parse, score)| {
                let question_type = classify(aq, &parse);
                parse.question_type = Some(question_type);
                parse.answer_kind = answer_kind(question_type, aq);
                let missing = find_missing(aq, &parse, question_type);
                Candidate { rank: 0, parse, score, question_type, missing }
            })
            .collect();
        // Stable: score descending, then complete before incomplete, then
        // (for numeric questions) more metric operands first.
        typed.sort_by(|a, b| {
            b.score
                .total
                .total_cmp(&a.score.total)
                .then_with(|| b.missing.is_complete().cmp(&a.missing.is_complete()))
                .then_with(|| numeric_fit(&b.parse).cmp(&numeric_fit(&a.parse)))
        });
        for (i, c) in typed.iter_mut().enumerate() {
            c.rank = i;
        }
        typed
    }

    /// Answer a question. Fails only on an empty question; every other
    /// failure degrades to a `None` answer with a diagnostic interpretation.
    pub fn answer(&self, question: &str, t: &PreparedTable) -> Result<Response> {
        let aq = self.annotate(question, t)?;
        let candidates = self.candidates(&aq, &t.table);
        for (i, c) in candidates.iter().enumerate() {
            let (parse, outcome) = if c.missing.is_complete() {
                (c.parse.clone(), None)
            } else {
                let Ok(outcome) = abduct(&c.parse, &c.missing, self.config.abduction, self.model.as_ref(), &t.table)
                else {
                    continue;
                };
                if !outcome.complete {
                    continue;
                }
                (outcome.parse.clone(), Some(outcome))
            };
            let Ok(plan) = build_plan(&parse, &t.table) else { continue };
            let result = execute(&plan, &t.table);
            let answer = if parse.answer_kind == AnswerKind::Boolean {
                boolean_answer(&result)
            } else {
                normalize_answer(&result, c.question_type, aq.headword_plural)
            };
            let sql = to_sql(&plan, &t.table);
            let interpretation = interpret(&aq, &parse, outcome.as_ref(), &t.table, Some(sql), None);
            return Ok(Response {
                answer,
                interpretation,
                candidates,
                chosen: Some(i),
                abduction: outcome,
                plan: Some(plan),
            });
        }
        let top = candidates.first();
        let empty = SemanticParse::default();
        let interpretation =
            interpret(&aq, top.map(|c| &c.parse).unwrap_or(&empty), None, &t.table, None, top.map(|c| &c.missing));
        Ok(Response {
            answer: Answer { value: AnswerValue::None, cells: Vec::new() },
            interpretation,
            candidates,
            chosen: None,
            abduction: None,
            plan: None,
        })
    }

    /// The corpus entry for a training question: its best candidate when
    /// that candidate lacks operands.
    pub fn corpus_item<'a>(
        &self,
        question_id: Option<String>,
        question: &str,
        t: &'a PreparedTable,
        gold: Vec<String>,
    ) -> Option<CorpusItem<'a>> {
        let aq = self.annotate(question, t).ok()?;
        let top = self.candidates(&aq, &t.table).into_iter().next()?;
        if top.missing.is_complete() {
            return None;
        }
        Some(CorpusItem { question_id, aq, parse: top.parse, report: top.missing, table: &t.table, gold })
    }
}

/// Metric operands of a parse that sorts, limits or aggregates. A column
/// with both a text and a numeric reading yields one candidate per reading;
/// such questions want the numeric one.
fn numeric_fit(p: &SemanticParse) -> usize {
    if p.sort.is_some() || p.limit.is_some() || p.aggregation.is_some() {
        p.metrics.len()
    } else {
        0
    }
}

/// A yes/no question is answered by whether its plan selects anything.
fn boolean_answer(result: &ResultSet) -> Answer {
    let mut cells: Vec<_> = result.values.iter().flat_map(|v| v.cells.iter().cloned()).collect();
    cells.sort();
    cells.dedup();
    Answer { value: AnswerValue::Boolean(!result.is_empty()), cells }
}

/// Load `table_path`, then answer with a fresh engine built from `config`.
pub fn answer_question(question: &str, table_path: &Path, config: &EngineConfig) -> Result<(Answer, Interpretation)> {
    let engine = Engine::new(config.clone())?;
    let table = engine.load_table(table_path)?;
    let r = engine.answer(question, &table)?;
    Ok((r.answer, r.interpretation))
}
