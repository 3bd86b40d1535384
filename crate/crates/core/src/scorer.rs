//! Linear ranking of candidate parses over hand-assigned weights. Annotation
//! coverage dominates; match quality and match target break ties.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use serde::Serialize;

use crate::annotate::{AnnotatedQuery, Annotation, AnnotationTarget};
use crate::error::{Error, Result};
use crate::grammar::SemanticParse;

const DEFAULT_WEIGHTS: &str = include_str!("../data/weights.txt");

pub const FEATURES: [&str; 5] = ["coverage", "exact", "approximate", "header", "cell"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Weights {
    pub coverage: f64,
    pub exact: f64,
    pub approximate: f64,
    pub header: f64,
    pub cell: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights::default_weights().clone()
    }
}

impl Weights {
    pub fn default_weights() -> &'static Weights {
        static W: OnceLock<Weights> = OnceLock::new();
        W.get_or_init(|| Weights::from_config(DEFAULT_WEIGHTS).expect("bundled weights"))
    }

    /// Parse `feature<TAB>weight` lines. Every feature must be present.
    pub fn from_config(text: &str) -> Result<Self> {
        let mut vals = [None; 5];
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: String| Error::Config { name: "weights".into(), line: i + 1, reason };
            let (name, w) = line
                .split_once('\t')
                .or_else(|| line.split_once(char::is_whitespace))
                .ok_or_else(|| err("expected feature<TAB>weight".into()))?;
            let idx = FEATURES
                .iter()
                .position(|f| *f == name.trim())
                .ok_or_else(|| err(format!("unknown feature {name:?}")))?;
            let w: f64 = w.trim().parse().map_err(|_| err(format!("bad weight {w:?}")))?;
            vals[idx] = Some(w);
        }
        let get = |i: usize| {
            vals[i].ok_or_else(|| Error::Config {
                name: "weights".into(),
                line: 0,
                reason: format!("missing feature {}", FEATURES[i]),
            })
        };
        Ok(Weights { coverage: get(0)?, exact: get(1)?, approximate: get(2)?, header: get(3)?, cell: get(4)? })
    }

    fn as_array(&self) -> [f64; 5] {
        [self.coverage, self.exact, self.approximate, self.header, self.cell]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ScoreBreakdown {
    pub annotated_words: usize,
    pub exact_matches: usize,
    pub approximate_matches: usize,
    pub header_matches: usize,
    pub cell_matches: usize,
    /// (feature, weight × value) in feature order.
    pub contributions: Vec<(String, f64)>,
    pub total: f64,
}

impl ScoreBreakdown {
    pub fn features(&self) -> [f64; 5] {
        [
            self.annotated_words as f64,
            self.exact_matches as f64,
            self.approximate_matches as f64,
            self.header_matches as f64,
            self.cell_matches as f64,
        ]
    }
}

/// Features of a set of consumed annotations.
pub fn score_annotations<'a>(consumed: impl IntoIterator<Item = &'a Annotation>, weights: &Weights) -> ScoreBreakdown {
    let mut words = BTreeSet::new();
    let mut b = ScoreBreakdown::default();
    for a in consumed {
        words.extend(a.start..a.end());
        if a.kind == crate::annotate::MatchKind::Exact {
            b.exact_matches += 1;
        } else if a.kind.is_approximate() {
            b.approximate_matches += 1;
        }
        match a.target {
            AnnotationTarget::Column { .. } => b.header_matches += 1,
            AnnotationTarget::Cell { .. } => b.cell_matches += 1,
            _ => {}
        }
    }
    b.annotated_words = words.len();
    let feats = b.features();
    b.contributions = FEATURES
        .iter()
        .zip(feats.iter().zip(weights.as_array()))
        .map(|(name, (v, w))| (name.to_string(), v * w))
        .collect();
    b.total = b.contributions.iter().map(|(_, c)| c).sum();
    b
}

pub fn score(candidate: &SemanticParse, aq: &AnnotatedQuery, weights: &Weights) -> ScoreBreakdown {
    score_annotations(candidate.provenance.iter().filter_map(|&i| aq.annotations.get(i)), weights)
}

/// Stable descending sort by total score.
pub fn rank(
    candidates: Vec<SemanticParse>,
    aq: &AnnotatedQuery,
    weights: &Weights,
) -> Vec<(SemanticParse, ScoreBreakdown)> {
    let mut scored: Vec<_> = candidates
        .into_iter()
        .map(|c| {
            let s = score(&c, aq, weights);
            (c, s)
        })
        .collect();
    scored.sort_by(|a, b| b.1.total.total_cmp(&a.1.total));
    scored
}
