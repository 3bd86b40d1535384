//! Answer comparison in the manner of the dataset's official evaluator:
//! Unicode folding, punctuation and citation cleanup, numbers compared by
//! value and dates by their parts.

use std::sync::OnceLock;

use regex::Regex;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::text::parse_number_token;

fn re(cell: &'static OnceLock<Regex>, pattern: &str) -> &'static Regex {
    cell.get_or_init(|| Regex::new(pattern).expect("valid regex"))
}

/// Canonical string form of an answer value.
pub fn normalize_answer_text(s: &str) -> String {
    static CITATION: OnceLock<Regex> = OnceLock::new();
    static PAREN: OnceLock<Regex> = OnceLock::new();
    let folded: String = s.nfkd().filter(|c| !is_combining_mark(*c)).collect();
    let mut t: String = folded
        .chars()
        .map(|c| match c {
            '‘' | '’' | '´' | '`' => '\'',
            '“' | '”' => '"',
            '‐' | '‑' | '‒' | '–' | '—' | '−' => '-',
            _ => c,
        })
        .collect();
    loop {
        let old = t.clone();
        t = re(&CITATION, r"((?:^|\s)\[[^\]]*\])|\[[^\]]*\]$").replace_all(&t, "").trim().to_string();
        t = re(&PAREN, r"(^|\s)\([^)]*\)$").replace_all(&t, "").trim().to_string();
        t = t.trim_matches(|c| c == '"' || c == '\'' || c == '`').trim().to_string();
        if let Some(stripped) = t.strip_suffix('.') {
            t = stripped.trim().to_string();
        }
        if t == old {
            break;
        }
    }
    t.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

#[derive(Clone, Debug, PartialEq)]
enum Val {
    Text(String),
    Number(String, f64),
    Date(String, [i32; 3]),
}

impl Val {
    fn parse(raw: &str) -> Val {
        let n = normalize_answer_text(raw);
        if let Some(x) = parse_number_token(&n) {
            return Val::Number(n, x);
        }
        if let Some(d) = parse_iso_date(&n) {
            return Val::Date(n, d);
        }
        Val::Text(n)
    }

    fn normalized(&self) -> &str {
        match self {
            Val::Text(s) | Val::Number(s, _) | Val::Date(s, _) => s,
        }
    }

    fn matches(&self, other: &Val) -> bool {
        if self.normalized() == other.normalized() {
            return true;
        }
        match (self, other) {
            (Val::Number(_, a), Val::Number(_, b)) => (a - b).abs() < 1e-6,
            (Val::Date(_, a), Val::Date(_, b)) => a == b,
            // A year-only date equals the bare year.
            (Val::Number(_, x), Val::Date(_, [y, -1, -1])) | (Val::Date(_, [y, -1, -1]), Val::Number(_, x)) => {
                *x == f64::from(*y)
            }
            _ => false,
        }
    }
}

/// `yyyy-mm-dd` with `xx` for unknown parts; unknown parts become -1.
fn parse_iso_date(s: &str) -> Option<[i32; 3]> {
    let parts: Vec<&str> = s.split('-').collect();
    let [y, m, d] = parts.as_slice() else { return None };
    let part = |p: &str, len: usize| -> Option<i32> {
        if p.chars().all(|c| c == 'x') && p.len() == len {
            Some(-1)
        } else if p.len() == len && p.chars().all(|c| c.is_ascii_digit()) {
            p.parse().ok()
        } else {
            None
        }
    };
    let date = [part(y, 4)?, part(m, 2)?, part(d, 2)?];
    if date == [-1, -1, -1] || date[1] > 12 || date[2] > 31 {
        return None;
    }
    Some(date)
}

/// Multiset match: same size, and a one-to-one pairing where every gold
/// value matches its predicted value. An empty prediction never matches.
pub fn answer_match(predicted: &[String], gold: &[String]) -> bool {
    if predicted.is_empty() || predicted.len() != gold.len() {
        return false;
    }
    let p: Vec<Val> = predicted.iter().map(|s| Val::parse(s)).collect();
    let g: Vec<Val> = gold.iter().map(|s| Val::parse(s)).collect();
    let mut used = vec![false; p.len()];
    assign(&g, &p, &mut used)
}

fn assign(gold: &[Val], pred: &[Val], used: &mut [bool]) -> bool {
    let Some((first, rest)) = gold.split_first() else { return true };
    for i in 0..pred.len() {
        if !used[i] && first.matches(&pred[i]) {
            used[i] = true;
            if assign(rest, pred, used) {
                return true;
            }
            used[i] = false;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn m(p: &[&str], g: &[&str]) -> bool {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        answer_match(&s(p), &s(g))
    }

    #[test]
    fn numbers_by_value() {
        assert!(m(&["2,005"], &["2005"]));
        assert!(m(&["3.0"], &["3"]));
        assert!(!m(&["3.1"], &["3"]));
    }

    #[test]
    fn lists_as_multisets() {
        assert!(m(&["a", "b"], &["b", "a"]));
        assert!(!m(&["a", "a"], &["a", "b"]));
        assert!(!m(&["a"], &["a", "b"]));
    }

    #[test]
    fn none_never_matches() {
        assert!(!m(&[], &["x"]));
        assert!(!m(&[], &[]));
    }

    #[test]
    fn text_cleanup() {
        assert!(m(&["Café Müller"], &["cafe muller"]));
        assert!(m(&["Lost and Found [1]"], &["lost and found"]));
        assert!(m(&["“Octane”"], &["octane"]));
        assert!(m(&["1995–96"], &["1995-96"]));
        assert!(m(&["Paris (France)"], &["paris"]));
    }

    #[test]
    fn dates_by_parts() {
        assert!(m(&["1995-xx-xx"], &["1995"]));
        assert!(m(&["1995"], &["1995-xx-xx"]));
        assert!(!m(&["1995-06-xx"], &["1995"]));
        assert!(m(&["2005-06-xx"], &["2005-06-xx"]));
        assert!(!m(&["2005-06-xx"], &["2005-07-xx"]));
        assert_eq!(parse_iso_date("xxxx-xx-xx"), None);
    }

    proptest! {
        #[test]
        fn reflexive_and_order_free(mut xs in prop::collection::vec("[a-z0-9 ]{1,8}", 1..5)) {
            xs.retain(|x| !x.trim().is_empty());
            prop_assume!(!xs.is_empty());
            prop_assert!(answer_match(&xs, &xs));
            let mut rev = xs.clone();
            rev.reverse();
            prop_assert!(answer_match(&rev, &xs));
            prop_assert_eq!(answer_match(&xs, &rev), answer_match(&rev, &xs));
        }
    }
}
