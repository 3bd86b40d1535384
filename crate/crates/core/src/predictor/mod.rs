//! Abductive operand prediction: a bag-of-words embedding model scoring
//! column headings against unmatched question terms, the leftmost-string
//! baseline, and counter-factual training-data generation.

mod abduct;
mod counterfactual;
mod io;
mod train;

use std::collections::HashMap;

use serde::Serialize;

pub use abduct::{abduct, baseline_leftmost_string, eligible_columns, AbductionMode, AbductionOutcome};
pub use counterfactual::{generate_training_data, single_missing_slot, substitute, verify_example, CorpusItem};
pub use io::{read_corpus_tsv, write_corpus_tsv};
pub use train::{train, Gradient, TrainConfig, TrainableEmbeddings};

use crate::error::{Error, Result};
use crate::table::ColumnId;
use crate::text::words;

pub const EMBEDDING_DIM: usize = 50;

/// One counter-factually labeled question: terms, candidate column headings
/// and the index of the single heading that produced the gold answer.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrainingExample {
    pub terms: Vec<String>,
    pub columns: Vec<String>,
    pub correct: usize,
    /// Column ids behind `columns`, when known.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub column_ids: Vec<ColumnId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub question_id: Option<String>,
}

impl TrainingExample {
    pub fn new(terms: Vec<String>, columns: Vec<String>, correct: usize) -> Self {
        TrainingExample { terms, columns, correct, column_ids: Vec::new(), question_id: None }
    }

    pub fn one_hot(&self) -> Vec<f64> {
        (0..self.columns.len()).map(|i| if i == self.correct { 1.0 } else { 0.0 }).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingTable {
    pub dim: usize,
    /// Words in index order.
    pub vocab: Vec<String>,
    index: HashMap<String, usize>,
    /// Row-major `vocab.len() × dim`.
    pub vectors: Vec<f32>,
}

impl EmbeddingTable {
    pub fn new(dim: usize, vocab: Vec<String>, vectors: Vec<f32>) -> Result<Self> {
        if vectors.len() != vocab.len() * dim {
            return Err(Error::ModelFormat(format!(
                "{} vectors values for {} words of dimension {dim}",
                vectors.len(),
                vocab.len()
            )));
        }
        let index = vocab.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        Ok(EmbeddingTable { dim, vocab, index, vectors })
    }

    pub fn get(&self, word: &str) -> Option<&[f32]> {
        self.index.get(word).map(|&i| &self.vectors[i * self.dim..(i + 1) * self.dim])
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    /// Sum of word vectors; unknown words add nothing. Returns the number of
    /// known words.
    pub fn embed(&self, text_words: &[String]) -> (Vec<f64>, usize) {
        let mut v = vec![0.0; self.dim];
        let mut known = 0;
        for w in text_words {
            if let Some(e) = self.get(w) {
                known += 1;
                for (a, b) in v.iter_mut().zip(e) {
                    *a += *b as f64;
                }
            }
        }
        (v, known)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TrainingMetadata {
    pub epochs: u32,
    pub seed: u64,
    pub split_seed: u64,
    pub learning_rate: f64,
    pub train_examples: u32,
    pub heldout_examples: u32,
    pub heldout_accuracy: Option<f64>,
    pub train_loss: Vec<f64>,
    pub heldout_loss: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PredictorModel {
    pub embeddings: EmbeddingTable,
    pub metadata: TrainingMetadata,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prediction {
    pub probabilities: Vec<f64>,
    pub argmax: usize,
    pub confidence: f64,
    /// Terms the model had an embedding for.
    pub known_terms: usize,
}

impl Prediction {
    /// Column indices by descending probability; ties keep column order.
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.probabilities.len()).collect();
        idx.sort_by(|&a, &b| self.probabilities[b].total_cmp(&self.probabilities[a]));
        idx
    }
}

/// Words of every term, normalized the way the annotator normalizes text.
pub fn term_words(terms: &[String]) -> Vec<String> {
    terms.iter().flat_map(|t| words(t)).collect()
}

pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let z: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / z).collect()
}

pub fn predict(model: &PredictorModel, terms: &[String], columns: &[String]) -> Result<Prediction> {
    if columns.is_empty() {
        return Err(Error::NoColumns);
    }
    let emb = &model.embeddings;
    let (q, known_terms) = emb.embed(&term_words(terms));
    let logits: Vec<f64> = columns
        .iter()
        .map(|c| {
            let (cv, _) = emb.embed(&words(c));
            q.iter().zip(&cv).map(|(a, b)| a * b).sum()
        })
        .collect();
    let probabilities = softmax(&logits);
    let mut argmax = 0;
    for (i, p) in probabilities.iter().enumerate() {
        if *p > probabilities[argmax] {
            argmax = i;
        }
    }
    Ok(Prediction { confidence: probabilities[argmax], argmax, probabilities, known_terms })
}

#[cfg(test)]
mod tests;
