//! The rule file: `rule-id: TERMINALS => action; action [floating|ordered]`.

use std::str::FromStr;
use std::sync::OnceLock;

use serde::Serialize;

use super::{Aggregation, Comparator, Direction, Ordinal, Relation};
use crate::annotate::Intent;
use crate::error::{Error, Result};

const DEFAULT_GRAMMAR: &str = include_str!("../../data/grammar.txt");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Terminal {
    Cell,
    TextCell,
    Dimension,
    Metric,
    Number,
    Placeholder,
    Cmp,
    Intent(Intent),
}

impl FromStr for Terminal {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "CELL" => Terminal::Cell,
            "TEXT_CELL" => Terminal::TextCell,
            "DIMENSION" => Terminal::Dimension,
            "METRIC" => Terminal::Metric,
            "NUMBER" => Terminal::Number,
            "PLACEHOLDER" => Terminal::Placeholder,
            "CMP" => Terminal::Cmp,
            other => Terminal::Intent(other.parse().map_err(|_| format!("unknown terminal {other:?}"))?),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RuleMode {
    Floating,
    Ordered,
}

/// A comparison operator given either by a constituent or literally.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ActionArg {
    Ref(usize),
    Comparator(Comparator),
}

/// Semantic actions. `usize` fields are 0-based constituent positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Action {
    Equals(usize),
    Compare { op: ActionArg, bound: usize, metric: usize },
    Position { relation: Relation, anchor: usize },
    /// Compare the table's chronological column with a year.
    Chrono { op: Comparator, bound: usize },
    Dimension(usize),
    Metric(usize),
    Placeholder(usize),
    Sort(Direction),
    Ordinal(Ordinal),
    Aggregation(Aggregation),
    Limit(usize),
    Marker(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrammarRule {
    pub id: String,
    pub terminals: Vec<Terminal>,
    pub actions: Vec<Action>,
    pub mode: RuleMode,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Grammar {
    pub rules: Vec<GrammarRule>,
}

impl Grammar {
    pub fn default_grammar() -> &'static Grammar {
        static G: OnceLock<Grammar> = OnceLock::new();
        G.get_or_init(|| Grammar::from_config(DEFAULT_GRAMMAR).expect("bundled grammar"))
    }

    pub fn from_config(text: &str) -> Result<Self> {
        let mut rules = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let rule = parse_rule(line).map_err(|reason| Error::Config { name: "grammar".into(), line: i + 1, reason })?;
            if rules.iter().any(|r: &GrammarRule| r.id == rule.id) {
                return Err(Error::Config { name: "grammar".into(), line: i + 1, reason: format!("duplicate rule {}", rule.id) });
            }
            rules.push(rule);
        }
        Ok(Grammar { rules })
    }
}

fn parse_rule(line: &str) -> std::result::Result<GrammarRule, String> {
    let (id, rest) = line.split_once(':').ok_or("expected `id: TERMINALS => actions mode`")?;
    let (lhs, rhs) = rest.split_once("=>").ok_or("missing `=>`")?;
    let terminals = lhs.split_whitespace().map(str::parse).collect::<std::result::Result<Vec<Terminal>, _>>()?;
    if terminals.is_empty() {
        return Err("rule has no terminals".into());
    }
    let rhs = rhs.trim();
    let (body, mode) = match rhs.rsplit_once(char::is_whitespace) {
        Some((b, "floating")) => (b, RuleMode::Floating),
        Some((b, "ordered")) => (b, RuleMode::Ordered),
        _ => return Err("rule must end with `floating` or `ordered`".into()),
    };
    let actions = body
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|a| parse_action(a, &terminals))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if actions.is_empty() {
        return Err("rule has no actions".into());
    }
    Ok(GrammarRule { id: id.trim().to_string(), terminals, actions, mode })
}

fn parse_action(text: &str, terminals: &[Terminal]) -> std::result::Result<Action, String> {
    let (slot, value) = text.split_once('=').ok_or_else(|| format!("bad action {text:?}"))?;
    let value = value.trim();
    let reference = |s: &str, allowed: &[Terminal]| -> std::result::Result<usize, String> {
        let n: usize = s
            .trim()
            .strip_prefix('$')
            .and_then(|n| n.parse().ok())
            .filter(|&n| n >= 1 && n <= terminals.len())
            .ok_or_else(|| format!("bad reference {s:?} in {text:?}"))?;
        let t = terminals[n - 1];
        let ok = allowed.is_empty() || allowed.contains(&t);
        if ok { Ok(n - 1) } else { Err(format!("{s} has terminal {t:?}, not allowed in {text:?}")) }
    };
    let call = |v: &str| -> Option<(String, Vec<String>)> {
        let (name, args) = v.strip_suffix(')')?.split_once('(')?;
        Some((name.to_string(), args.split(',').map(|a| a.trim().to_string()).collect()))
    };
    let cells = [Terminal::Cell, Terminal::TextCell];
    Ok(match slot.trim() {
        "filter" => {
            let (name, args) = call(value).ok_or_else(|| format!("bad filter {value:?}"))?;
            let one = |allowed: &[Terminal]| -> std::result::Result<usize, String> {
                match args.as_slice() {
                    [a] => reference(a, allowed),
                    _ => Err(format!("{name} takes one argument")),
                }
            };
            match name.as_str() {
                "equals" => Action::Equals(one(&cells)?),
                "before" => Action::Position { relation: Relation::Before, anchor: one(&cells)? },
                "after" => Action::Position { relation: Relation::After, anchor: one(&cells)? },
                "earlier" => Action::Chrono { op: Comparator::Lt, bound: one(&[Terminal::Number])? },
                "later" => Action::Chrono { op: Comparator::Gt, bound: one(&[Terminal::Number])? },
                "compare" => {
                    let [op, bound, metric] = args.as_slice() else {
                        return Err("compare takes three arguments".into());
                    };
                    let op = if op.starts_with('$') {
                        ActionArg::Ref(reference(op, &[Terminal::Cmp])?)
                    } else {
                        let intent: Intent = op.parse().map_err(|_| format!("unknown comparator {op:?}"))?;
                        ActionArg::Comparator(Comparator::from_intent(intent).ok_or_else(|| format!("{op} is not a comparator"))?)
                    };
                    Action::Compare {
                        op,
                        bound: reference(bound, &[Terminal::Number])?,
                        metric: reference(metric, &[Terminal::Metric])?,
                    }
                }
                other => return Err(format!("unknown filter {other:?}")),
            }
        }
        "dimension" => Action::Dimension(reference(value, &[Terminal::Dimension])?),
        "metric" => Action::Metric(reference(value, &[Terminal::Metric])?),
        "placeholder" => Action::Placeholder(reference(value, &[Terminal::Placeholder])?),
        "limit" => Action::Limit(reference(value, &[Terminal::Number])?),
        "marker" => Action::Marker(reference(value, &[])?),
        "sort" => Action::Sort(match value {
            "desc" => Direction::Desc,
            "asc" => Direction::Asc,
            _ => return Err(format!("bad sort {value:?}")),
        }),
        "ordinal" => Action::Ordinal(match value {
            "first" => Ordinal::First,
            "last" => Ordinal::Last,
            _ => return Err(format!("bad ordinal {value:?}")),
        }),
        "aggregation" => Action::Aggregation(match value {
            "count" => Aggregation::Count,
            "sum" => Aggregation::Sum,
            "average" => Aggregation::Average,
            "difference" => Aggregation::Difference,
            _ => return Err(format!("bad aggregation {value:?}")),
        }),
        other => Err(format!("unknown slot {other:?}"))?,
    })
}
