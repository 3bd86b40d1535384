use std::fmt;

use serde::{Deserialize, Serialize};

/// A calendar date with any subset of components; at least one is present.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DateValue {
    pub year: Option<i32>,
    pub month: Option<u8>,
    pub day: Option<u8>,
}

impl DateValue {
    pub fn year(year: i32) -> Self {
        DateValue { year: Some(year), month: None, day: None }
    }

    pub fn ymd(year: i32, month: u8, day: u8) -> Self {
        DateValue { year: Some(year), month: Some(month), day: Some(day) }
    }

    /// Sort key: absent components sort first within their parent.
    pub fn ordinal(&self) -> f64 {
        let y = self.year.unwrap_or(0) as f64;
        let m = self.month.unwrap_or(0) as f64;
        let d = self.day.unwrap_or(0) as f64;
        y * 10_000.0 + m * 100.0 + d
    }

    pub fn is_year_only(&self) -> bool {
        self.year.is_some() && self.month.is_none() && self.day.is_none()
    }
}

impl fmt::Display for DateValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = |v: Option<i64>, w: usize| match v {
            Some(v) => format!("{v:0w$}"),
            None => "x".repeat(w),
        };
        write!(
            f,
            "{}-{}-{}",
            part(self.year.map(i64::from), 4),
            part(self.month.map(i64::from), 2),
            part(self.day.map(i64::from), 2)
        )
    }
}

/// A cell after structure recognition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TypedValue {
    Text { text: String },
    Number { value: f64, unit: Option<String>, surface: String },
    Date { date: DateValue },
    /// Seconds since midnight (or duration in seconds).
    Time { seconds: f64 },
    Score { result: Option<char>, points_for: i64, points_against: i64 },
    Empty,
}

impl TypedValue {
    pub fn text(s: impl Into<String>) -> Self {
        TypedValue::Text { text: s.into() }
    }

    pub fn number(value: f64) -> Self {
        TypedValue::Number { value, unit: None, surface: format_number(value) }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, TypedValue::Empty)
    }

    /// The numeric reading of a value, if it has one. Year-only dates read
    /// as the year.
    pub fn as_number(&self) -> Option<f64> {
        match self {
            TypedValue::Number { value, .. } => Some(*value),
            TypedValue::Date { date } if date.is_year_only() => date.year.map(f64::from),
            _ => None,
        }
    }

    /// Key used for ordering rows chronologically or numerically.
    pub fn order_key(&self) -> Option<f64> {
        match self {
            TypedValue::Number { value, .. } => Some(*value),
            TypedValue::Date { date } => Some(date.ordinal()),
            TypedValue::Time { seconds } => Some(*seconds),
            _ => None,
        }
    }

    /// Human-readable rendering used in answers and payloads.
    pub fn render(&self) -> String {
        match self {
            TypedValue::Text { text } => text.clone(),
            TypedValue::Number { surface, .. } => surface.clone(),
            TypedValue::Date { date } => date.to_string(),
            TypedValue::Time { seconds } => {
                let s = *seconds as i64;
                format!("{}:{:02}:{:02}", s / 3600, (s / 60) % 60, s % 60)
            }
            TypedValue::Score { result, points_for, points_against } => match result {
                Some(r) => format!("{r} {points_for}-{points_against}"),
                None => format!("{points_for}-{points_against}"),
            },
            TypedValue::Empty => String::new(),
        }
    }
}

impl fmt::Display for TypedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Shortest decimal rendering: integers without a fractional part.
pub fn format_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        let s = format!("{v:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn date_display_marks_missing_parts() {
        assert_eq!(DateValue::year(1995).to_string(), "1995-xx-xx");
        assert_eq!(DateValue::ymd(2005, 6, 27).to_string(), "2005-06-27");
    }

    #[test]
    fn number_rendering() {
        assert_eq!(format_number(2005.0), "2005");
        assert_eq!(format_number(-3.25), "-3.25");
        assert_eq!(format_number(0.1 + 0.2), "0.3");
    }
}
