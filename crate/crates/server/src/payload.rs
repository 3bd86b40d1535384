//! JSON bodies shared by the HTTP API and `ask --json`.

use serde::Serialize;
use tabqa_core::engine::{Candidate, Interpretation, Response};
use tabqa_core::executor::{AnswerValue, CellRef};
use tabqa_core::predictor::AbductionMode;

/// Bumped on any incompatible change to a response body.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct AnswerPayload<'a> {
    pub schema_version: u32,
    pub table_id: &'a str,
    pub abduction: AbductionMode,
    /// Answer strings; empty when the question could not be answered.
    pub answer: Vec<String>,
    pub value: &'a AnswerValue,
    pub cells: &'a [CellRef],
    pub interpretation: &'a Interpretation,
    pub candidates: &'a [Candidate],
    pub chosen: Option<usize>,
}

impl<'a> AnswerPayload<'a> {
    pub fn new(table_id: &'a str, abduction: AbductionMode, r: &'a Response) -> Self {
        AnswerPayload {
            schema_version: SCHEMA_VERSION,
            table_id,
            abduction,
            answer: r.answer.value.strings(),
            value: &r.answer.value,
            cells: &r.answer.cells,
            interpretation: &r.interpretation,
            candidates: &r.candidates,
            chosen: r.chosen,
        }
    }
}
