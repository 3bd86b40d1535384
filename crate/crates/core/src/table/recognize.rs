//! Cell-level structure recognition.

use std::sync::OnceLock;

use regex::Regex;

use super::value::{DateValue, TypedValue};
use crate::error::{Error, Result};

const DEFAULT_CONFIG: &str = include_str!("../../data/recognizers.txt");

const MONTHS: [&str; 12] = [
    "january", "february", "march", "april", "may", "june", "july", "august", "september",
    "october", "november", "december",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum DateFormat {
    YmdSlash,
    YmdDash,
    MonthDayYear,
    DayMonthYear,
    Year,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum TimeFormat {
    Hms,
    Hm,
}

/// The recognizer inventory: which date/time/number formats, units and
/// score result letters are active.
#[derive(Clone, Debug)]
pub struct Recognizers {
    dates: Vec<DateFormat>,
    times: Vec<TimeFormat>,
    percent: bool,
    units: Vec<String>,
    score_letters: Vec<char>,
    number_re: Regex,
}

struct Patterns {
    score: Regex,
    ymd_slash: Regex,
    ymd_dash: Regex,
    month_day_year: Regex,
    day_month_year: Regex,
    year: Regex,
    hms: Regex,
    hm: Regex,
}

fn patterns() -> &'static Patterns {
    static P: OnceLock<Patterns> = OnceLock::new();
    P.get_or_init(|| Patterns {
        score: Regex::new(r"^(?:([A-Za-z])\s+)?(\d{1,3})\s*[-–—]\s*(\d{1,3})$").unwrap(),
        ymd_slash: Regex::new(r"^(\d{4})/(\d{1,2})/(\d{1,2})$").unwrap(),
        ymd_dash: Regex::new(r"^(\d{4})-(\d{1,2})-(\d{1,2})$").unwrap(),
        month_day_year: Regex::new(r"^([A-Za-z]+)\.?\s+(\d{1,2}),?\s+(\d{4})$").unwrap(),
        day_month_year: Regex::new(r"^(\d{1,2})\s+([A-Za-z]+)\.?,?\s+(\d{4})$").unwrap(),
        year: Regex::new(r"^(\d{4})$").unwrap(),
        hms: Regex::new(r"^(\d{1,2}):(\d{2}):(\d{2})$").unwrap(),
        hm: Regex::new(r"^(\d{1,2}):(\d{2})$").unwrap(),
    })
}

impl Recognizers {
    /// Parse a recognizer config: one `<class> <argument>` per line, `#`
    /// comments allowed.
    pub fn from_config(text: &str) -> Result<Self> {
        let mut dates = Vec::new();
        let mut times = Vec::new();
        let (mut signed, mut thousands, mut decimal, mut percent) = (false, false, false, false);
        let mut units = Vec::new();
        let mut score_letters = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: &str| Error::Config {
                name: "recognizers".into(),
                line: i + 1,
                reason: reason.to_string(),
            };
            let (class, arg) = line.split_once(char::is_whitespace).ok_or_else(|| err("missing argument"))?;
            let arg = arg.trim();
            match class {
                "date" => dates.push(match arg {
                    "YYYY/MM/DD" => DateFormat::YmdSlash,
                    "YYYY-MM-DD" => DateFormat::YmdDash,
                    "MONTH D, YYYY" => DateFormat::MonthDayYear,
                    "D MONTH YYYY" => DateFormat::DayMonthYear,
                    "YYYY" => DateFormat::Year,
                    _ => return Err(err("unknown date format")),
                }),
                "time" => times.push(match arg {
                    "H:MM:SS" => TimeFormat::Hms,
                    "H:MM" => TimeFormat::Hm,
                    _ => return Err(err("unknown time format")),
                }),
                "number" => match arg {
                    "signed" => signed = true,
                    "thousands" => thousands = true,
                    "decimal" => decimal = true,
                    "percent" => percent = true,
                    _ => return Err(err("unknown number feature")),
                },
                "unit" => units.push(arg.to_string()),
                "score-result" => {
                    let mut chars = arg.chars();
                    match (chars.next(), chars.next()) {
                        (Some(c), None) => score_letters.push(c.to_ascii_uppercase()),
                        _ => return Err(err("score result must be one letter")),
                    }
                }
                _ => return Err(err("unknown pattern class")),
            }
        }
        // Longest unit first so "km/h" wins over "km".
        units.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        let number_re = build_number_regex(signed, thousands, decimal);
        Ok(Recognizers { dates, times, percent, units, score_letters, number_re })
    }

    pub fn default_set() -> &'static Recognizers {
        static R: OnceLock<Recognizers> = OnceLock::new();
        R.get_or_init(|| Recognizers::from_config(DEFAULT_CONFIG).expect("bundled recognizer config"))
    }

    /// Recognize the most specific structure of a cell. Total: falls back to
    /// `Text`.
    pub fn parse(&self, text: &str) -> TypedValue {
        let t = text.trim();
        if t.is_empty() {
            return TypedValue::Empty;
        }
        if let Some(v) = self.score(t) {
            return v;
        }
        if let Some(d) = self.date(t) {
            return TypedValue::Date { date: d };
        }
        if let Some(s) = self.time(t) {
            return TypedValue::Time { seconds: s };
        }
        if let Some(v) = self.number_with_unit(t) {
            return v;
        }
        if let Some(value) = self.number(t) {
            return TypedValue::Number { value, unit: None, surface: t.to_string() };
        }
        TypedValue::text(t)
    }

    fn score(&self, t: &str) -> Option<TypedValue> {
        let c = patterns().score.captures(t)?;
        let result = match c.get(1) {
            Some(m) => {
                let letter = m.as_str().chars().next()?.to_ascii_uppercase();
                if !self.score_letters.contains(&letter) {
                    return None;
                }
                Some(letter)
            }
            None => None,
        };
        if self.score_letters.is_empty() {
            return None;
        }
        Some(TypedValue::Score {
            result,
            points_for: c[2].parse().ok()?,
            points_against: c[3].parse().ok()?,
        })
    }

    fn date(&self, t: &str) -> Option<DateValue> {
        let p = patterns();
        for f in &self.dates {
            let d = match f {
                DateFormat::YmdSlash => p.ymd_slash.captures(t).and_then(|c| ymd(&c[1], &c[2], &c[3])),
                DateFormat::YmdDash => p.ymd_dash.captures(t).and_then(|c| ymd(&c[1], &c[2], &c[3])),
                DateFormat::MonthDayYear => p
                    .month_day_year
                    .captures(t)
                    .and_then(|c| Some((month_number(&c[1])?, c[2].to_string(), c[3].to_string())))
                    .and_then(|(m, d, y)| ymd(&y, &m.to_string(), &d)),
                DateFormat::DayMonthYear => p
                    .day_month_year
                    .captures(t)
                    .and_then(|c| Some((month_number(&c[2])?, c[1].to_string(), c[3].to_string())))
                    .and_then(|(m, d, y)| ymd(&y, &m.to_string(), &d)),
                DateFormat::Year => p
                    .year
                    .captures(t)
                    .and_then(|c| c[1].parse::<i32>().ok())
                    .filter(|y| (1000..=2999).contains(y))
                    .map(DateValue::year),
            };
            if d.is_some() {
                return d;
            }
        }
        None
    }

    fn time(&self, t: &str) -> Option<f64> {
        let p = patterns();
        for f in &self.times {
            let s = match f {
                TimeFormat::Hms => p.hms.captures(t).and_then(|c| {
                    let (h, m, s) = (c[1].parse::<u32>().ok()?, c[2].parse::<u32>().ok()?, c[3].parse::<u32>().ok()?);
                    (m < 60 && s < 60).then(|| f64::from(h * 3600 + m * 60 + s))
                }),
                TimeFormat::Hm => p.hm.captures(t).and_then(|c| {
                    let (h, m) = (c[1].parse::<u32>().ok()?, c[2].parse::<u32>().ok()?);
                    (m < 60).then(|| f64::from(h * 3600 + m * 60))
                }),
            };
            if s.is_some() {
                return s;
            }
        }
        None
    }

    fn number_with_unit(&self, t: &str) -> Option<TypedValue> {
        for unit in &self.units {
            if unit == "%" && !self.percent {
                continue;
            }
            let Some(head) = strip_suffix_ci(t, unit) else { continue };
            // Alphabetic units need a boundary: "5 m" or "5m", never "5mm".
            let head_trimmed = head.trim_end();
            if head_trimmed.is_empty() {
                continue;
            }
            if let Some(value) = self.number(head_trimmed) {
                return Some(TypedValue::Number {
                    value,
                    unit: Some(unit.clone()),
                    surface: t.to_string(),
                });
            }
        }
        None
    }

    fn number(&self, t: &str) -> Option<f64> {
        let t = t.replace('−', "-");
        if !self.number_re.is_match(&t) {
            return None;
        }
        let cleaned: String = t.chars().filter(|c| *c != ',').collect();
        cleaned.parse::<f64>().ok().filter(|v| v.is_finite())
    }
}

fn build_number_regex(signed: bool, thousands: bool, decimal: bool) -> Regex {
    let sign = if signed { "[+-]?" } else { "" };
    let int = if thousands { r"(?:\d{1,3}(?:,\d{3})+|\d+)" } else { r"\d+" };
    let body = if decimal { format!(r"(?:{int}(?:\.\d+)?|\.\d+)") } else { int.to_string() };
    Regex::new(&format!("^{sign}{body}$")).unwrap()
}

fn strip_suffix_ci<'a>(t: &'a str, suffix: &str) -> Option<&'a str> {
    if t.len() < suffix.len() || !t.is_char_boundary(t.len() - suffix.len()) {
        return None;
    }
    let (head, tail) = t.split_at(t.len() - suffix.len());
    tail.eq_ignore_ascii_case(suffix).then_some(head)
}

fn ymd(y: &str, m: &str, d: &str) -> Option<DateValue> {
    let (y, m, d) = (y.parse::<i32>().ok()?, m.parse::<u8>().ok()?, d.parse::<u8>().ok()?);
    ((1..=12).contains(&m) && (1..=31).contains(&d)).then(|| DateValue::ymd(y, m, d))
}

fn month_number(name: &str) -> Option<u8> {
    let n = name.to_lowercase();
    MONTHS
        .iter()
        .position(|m| *m == n || (n.len() >= 3 && m.starts_with(&n) && (n.len() == 3 || n == "sept")))
        .map(|i| i as u8 + 1)
}

/// Recognize a cell with the bundled recognizer inventory.
pub fn parse_cell(text: &str) -> TypedValue {
    Recognizers::default_set().parse(text)
}
