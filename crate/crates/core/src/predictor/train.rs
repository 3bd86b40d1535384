//! Full-batch gradient descent on mean cross-entropy.

use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{softmax, term_words, EmbeddingTable, PredictorModel, TrainingExample, TrainingMetadata, EMBEDDING_DIM};
use crate::error::{Error, Result};
use crate::text::words;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub dim: usize,
    pub learning_rate: f64,
    pub epochs: u32,
    pub init_range: f64,
    pub seed: u64,
    pub split_seed: u64,
    pub heldout_fraction: f64,
    /// Epochs without held-out improvement before stopping.
    pub patience: u32,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: EMBEDDING_DIM,
            learning_rate: 0.05,
            epochs: 200,
            init_range: 0.1,
            seed: 17,
            split_seed: 29,
            heldout_fraction: 0.3,
            patience: 20,
        }
    }
}

/// An example with words resolved to vocabulary indices.
#[derive(Clone, Debug)]
struct Encoded {
    terms: Vec<usize>,
    columns: Vec<Vec<usize>>,
    correct: usize,
}

/// Double-precision embeddings being trained.
#[derive(Clone, Debug)]
pub struct TrainableEmbeddings {
    pub dim: usize,
    pub vocab: Vec<String>,
    index: HashMap<String, usize>,
    pub weights: Vec<f64>,
}

/// Sparse gradient: one row per touched word.
pub type Gradient = HashMap<usize, Vec<f64>>;

impl TrainableEmbeddings {
    /// Vocabulary from every term and heading word, sorted; weights uniform
    /// in `[-range, range]`.
    pub fn init(examples: &[TrainingExample], dim: usize, range: f64, seed: u64) -> Self {
        let mut vocab = BTreeSet::new();
        for e in examples {
            vocab.extend(term_words(&e.terms));
            for c in &e.columns {
                vocab.extend(words(c));
            }
        }
        let vocab: Vec<String> = vocab.into_iter().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights = (0..vocab.len() * dim).map(|_| rng.gen_range(-range..=range)).collect();
        let index = vocab.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        TrainableEmbeddings { dim, vocab, index, weights }
    }

    fn encode(&self, e: &TrainingExample) -> Encoded {
        let ids = |ws: Vec<String>| ws.iter().filter_map(|w| self.index.get(w).copied()).collect::<Vec<_>>();
        Encoded {
            terms: ids(term_words(&e.terms)),
            columns: e.columns.iter().map(|c| ids(words(c))).collect(),
            correct: e.correct,
        }
    }

    fn sum(&self, ids: &[usize]) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        for &i in ids {
            for (a, b) in v.iter_mut().zip(&self.weights[i * self.dim..(i + 1) * self.dim]) {
                *a += b;
            }
        }
        v
    }

    fn logits(&self, e: &Encoded) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
        let q = self.sum(&e.terms);
        let cols: Vec<Vec<f64>> = e.columns.iter().map(|c| self.sum(c)).collect();
        let logits = cols.iter().map(|c| c.iter().zip(&q).map(|(a, b)| a * b).sum()).collect();
        (q, cols, logits)
    }

    fn example_loss(&self, e: &Encoded) -> f64 {
        let (_, _, logits) = self.logits(e);
        -softmax(&logits)[e.correct].max(f64::MIN_POSITIVE).ln()
    }

    /// Mean cross-entropy.
    pub fn loss(&self, examples: &[TrainingExample]) -> f64 {
        if examples.is_empty() {
            return 0.0;
        }
        examples.iter().map(|e| self.example_loss(&self.encode(e))).sum::<f64>() / examples.len() as f64
    }

    /// Gradient of the mean cross-entropy with respect to every touched row.
    pub fn gradient(&self, examples: &[TrainingExample]) -> Gradient {
        let encoded: Vec<Encoded> = examples.iter().map(|e| self.encode(e)).collect();
        self.gradient_encoded(&encoded)
    }

    fn gradient_encoded(&self, examples: &[Encoded]) -> Gradient {
        let mut grad: Gradient = HashMap::new();
        let scale = 1.0 / examples.len().max(1) as f64;
        let dim = self.dim;
        for e in examples {
            let (q, cols, logits) = self.logits(e);
            let p = softmax(&logits);
            // dL/dlogit_j = p_j - y_j
            let delta: Vec<f64> = p.iter().enumerate().map(|(j, pj)| pj - if j == e.correct { 1.0 } else { 0.0 }).collect();
            let mut dq = vec![0.0; dim];
            for (d, c) in delta.iter().zip(&cols) {
                for k in 0..dim {
                    dq[k] += d * c[k];
                }
            }
            for &w in &e.terms {
                let row = grad.entry(w).or_insert_with(|| vec![0.0; dim]);
                for k in 0..dim {
                    row[k] += scale * dq[k];
                }
            }
            for (d, col) in delta.iter().zip(&e.columns) {
                for &w in col {
                    let row = grad.entry(w).or_insert_with(|| vec![0.0; dim]);
                    for k in 0..dim {
                        row[k] += scale * d * q[k];
                    }
                }
            }
        }
        grad
    }

    fn step(&mut self, grad: &Gradient, lr: f64) {
        for (&w, g) in grad {
            for (k, gk) in g.iter().enumerate() {
                self.weights[w * self.dim + k] -= lr * gk;
            }
        }
    }

    fn accuracy(&self, examples: &[Encoded]) -> f64 {
        let hits = examples
            .iter()
            .filter(|e| {
                let (_, _, logits) = self.logits(e);
                let mut best = 0;
                for (i, l) in logits.iter().enumerate() {
                    if *l > logits[best] {
                        best = i;
                    }
                }
                best == e.correct
            })
            .count();
        hits as f64 / examples.len().max(1) as f64
    }

    pub fn into_table(self) -> EmbeddingTable {
        let vectors = self.weights.iter().map(|&w| w as f32).collect();
        EmbeddingTable::new(self.dim, self.vocab, vectors).expect("consistent shape")
    }
}

/// Train on a per-example 70/30 split, keeping the parameters with the
/// lowest held-out loss.
pub fn train(examples: &[TrainingExample], config: &TrainConfig) -> Result<PredictorModel> {
    if examples.is_empty() {
        return Err(Error::NoTrainingExamples);
    }
    let mut order: Vec<usize> = (0..examples.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(config.split_seed));
    let n_heldout = if examples.len() < 2 { 0 } else { (examples.len() as f64 * config.heldout_fraction).round() as usize };
    let (heldout_idx, train_idx) = order.split_at(n_heldout);

    let mut params = TrainableEmbeddings::init(examples, config.dim, config.init_range, config.seed);
    let train_set: Vec<Encoded> = train_idx.iter().map(|&i| params.encode(&examples[i])).collect();
    let heldout_set: Vec<Encoded> = heldout_idx.iter().map(|&i| params.encode(&examples[i])).collect();
    let mean_loss = |p: &TrainableEmbeddings, set: &[Encoded]| {
        set.iter().map(|e| p.example_loss(e)).sum::<f64>() / set.len().max(1) as f64
    };

    let mut meta = TrainingMetadata {
        seed: config.seed,
        split_seed: config.split_seed,
        learning_rate: config.learning_rate,
        train_examples: train_set.len() as u32,
        heldout_examples: heldout_set.len() as u32,
        ..Default::default()
    };
    let mut best = (f64::INFINITY, params.weights.clone(), 0u32);
    for epoch in 1..=config.epochs {
        let grad = params.gradient_encoded(&train_set);
        params.step(&grad, config.learning_rate);
        meta.train_loss.push(mean_loss(&params, &train_set));
        meta.epochs = epoch;
        if heldout_set.is_empty() {
            best = (0.0, params.weights.clone(), epoch);
            continue;
        }
        let h = mean_loss(&params, &heldout_set);
        meta.heldout_loss.push(h);
        if h < best.0 {
            best = (h, params.weights.clone(), epoch);
        } else if epoch - best.2 >= config.patience {
            log::info!("early stop at epoch {epoch}; best held-out loss {:.4} at epoch {}", best.0, best.2);
            break;
        }
    }
    params.weights = best.1;
    if !heldout_set.is_empty() {
        meta.heldout_accuracy = Some(params.accuracy(&heldout_set));
    }
    Ok(PredictorModel { embeddings: params.into_table(), metadata: meta })
}
