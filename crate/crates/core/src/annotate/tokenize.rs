use serde::Serialize;

use crate::error::{Error, Result};
use crate::text::stem;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Token {
    /// The token as written in the question.
    pub surface: String,
    /// Lowercased form used for matching.
    pub text: String,
    pub stem: String,
    /// Byte range in the original question.
    pub span: (usize, usize),
    pub index: usize,
}

/// Split a question into lowercased word tokens. Surrounding punctuation is
/// dropped; punctuation inside a token (numbers, dates, hyphenated words) is
/// kept. A trailing possessive `'s` is removed.
pub fn tokenize(question: &str) -> Result<Vec<Token>> {
    if question.trim().is_empty() {
        return Err(Error::EmptyQuestion);
    }
    let mut tokens = Vec::new();
    let mut offset = 0;
    for chunk in question.split_inclusive(char::is_whitespace) {
        let start_of_chunk = offset;
        offset += chunk.len();
        let word = chunk.trim_end();
        let lead = word.len() - word.trim_start_matches(is_strippable).len();
        let mut body = word.trim_start_matches(is_strippable).trim_end_matches(is_strippable);
        for suffix in ["'s", "’s"] {
            if body.len() > suffix.len() && body.to_lowercase().ends_with(suffix) {
                body = &body[..body.len() - suffix.len()];
            }
        }
        if body.is_empty() {
            continue;
        }
        let start = start_of_chunk + lead;
        let text = body.to_lowercase();
        tokens.push(Token {
            surface: body.to_string(),
            stem: stem(&text),
            text,
            span: (start, start + body.len()),
            index: tokens.len(),
        });
    }
    if tokens.is_empty() {
        return Err(Error::EmptyQuestion);
    }
    Ok(tokens)
}

fn is_strippable(c: char) -> bool {
    (c.is_ascii_punctuation() && c != '%' && c != '#' && c != '$')
        || matches!(c, '“' | '”' | '‘' | '’' | '«' | '»' | '…' | '¿')
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(q: &str) -> Vec<String> {
        tokenize(q).unwrap().into_iter().map(|t| t.text).collect()
    }

    #[test]
    fn running_example_has_eight_tokens() {
        let t = texts("in what movie was barton also the producer?");
        assert_eq!(t, vec!["in", "what", "movie", "was", "barton", "also", "the", "producer"]);
    }

    #[test]
    fn numbers_survive() {
        assert_eq!(texts("more than 10 wins"), vec!["more", "than", "10", "wins"]);
        assert_eq!(texts("after 2005/06/27, 1,234 km/h"), vec!["after", "2005/06/27", "1,234", "km/h"]);
    }

    #[test]
    fn possessive_and_quotes() {
        assert_eq!(texts("\"Barton's\" films"), vec!["barton", "films"]);
    }

    #[test]
    fn spans_point_into_question() {
        let q = "Who won  (before) Tom?";
        for t in tokenize(q).unwrap() {
            assert_eq!(&q[t.span.0..t.span.1], t.surface);
        }
    }

    #[test]
    fn empty_question_is_an_error() {
        assert!(tokenize("").is_err());
        assert!(tokenize(" ?! ").is_err());
    }
}
