//! Text normalization shared by the knowledge base, the annotator and the
//! executor's text comparisons.

use std::sync::OnceLock;

use rust_stemmers::{Algorithm, Stemmer};

/// Lowercase, trim, collapse internal whitespace and strip surrounding
/// punctuation.
pub fn normalize(s: &str) -> String {
    let collapsed = s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
    collapsed
        .trim_matches(|c: char| is_edge_punct(c))
        .trim()
        .to_string()
}

fn is_edge_punct(c: char) -> bool {
    c.is_ascii_punctuation() && c != '%' && c != '#' && c != '$'
        || matches!(c, '“' | '”' | '‘' | '’' | '«' | '»' | '…')
        || c.is_whitespace()
}

/// Words of a normalized string, each stripped of surrounding punctuation.
pub fn words(s: &str) -> Vec<String> {
    normalize(s)
        .split_whitespace()
        .map(|w| w.trim_matches(|c: char| is_edge_punct(c)).to_string())
        .filter(|w| !w.is_empty())
        .collect()
}

/// Parse a plain number the way a question token is written: optional sign,
/// comma thousands separators, optional decimals.
pub fn parse_number_token(s: &str) -> Option<f64> {
    let s = s.trim();
    if s.is_empty() || !s.chars().any(|c| c.is_ascii_digit()) {
        return None;
    }
    let cleaned: String = s.chars().filter(|c| *c != ',').collect();
    if !cleaned
        .chars()
        .all(|c| c.is_ascii_digit() || c == '.' || c == '-' || c == '+')
    {
        return None;
    }
    cleaned.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// English suffix-stripping stem of a lowercase word.
pub fn stem(word: &str) -> String {
    static STEMMER: OnceLock<Stemmer> = OnceLock::new();
    let stemmer = STEMMER.get_or_init(|| Stemmer::create(Algorithm::English));
    stemmer.stem(&word.to_lowercase()).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_folds_case_space_and_edges() {
        assert_eq!(normalize("  Also   Producer. "), "also producer");
        assert_eq!(normalize("\"Title\""), "title");
        assert_eq!(normalize("km/h"), "km/h");
        assert_eq!(normalize("45%"), "45%");
        assert_eq!(normalize("..."), "");
    }

    #[test]
    fn words_split() {
        assert_eq!(words("Area (mm2)"), vec!["area", "mm2"]);
        assert_eq!(words("Points-for"), vec!["points-for"]);
    }

    #[test]
    fn stems() {
        assert_eq!(stem("producers"), stem("producer"));
        assert_eq!(stem("Wins"), "win");
    }

    #[test]
    fn number_tokens() {
        assert_eq!(parse_number_token("1,234"), Some(1234.0));
        assert_eq!(parse_number_token("-3.5"), Some(-3.5));
        assert_eq!(parse_number_token("3rd"), None);
        assert_eq!(parse_number_token("abc"), None);
    }
}
