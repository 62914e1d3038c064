//! Parser for coqtop's plain goal display.
//!
//! ```text
//! 2 subgoals
//!
//!   P, Q, R : Prop
//!   ============================
//!   (P /\ Q -> R) -> P -> Q -> R
//!
//! subgoal 2 is:
//!  (P -> Q -> R) -> P /\ Q -> R
//! ```

use serde::{Deserialize, Serialize};

use crate::diag::{Code, Diagnostic, Result};

/// One line of the local context, possibly binding several names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub names: Vec<String>,
    pub type_expr: String,
}

impl Hypothesis {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>, type_expr: impl Into<String>) -> Self {
        Hypothesis {
            names: names.into_iter().map(Into::into).collect(),
            type_expr: type_expr.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofState {
    pub subgoal_count: usize,
    /// Context of the focused goal.
    pub hypotheses: Vec<Hypothesis>,
    /// `goals[0]` is the focused goal.
    pub goals: Vec<String>,
    pub raw: String,
}

impl ProofState {
    pub fn focused_goal(&self) -> Option<&str> {
        self.goals.first().map(String::as_str)
    }

    pub fn is_complete(&self) -> bool {
        self.subgoal_count == 0
    }

    /// Type of the hypothesis named `name` in the focused context.
    pub fn lookup(&self, name: &str) -> Option<&str> {
        self.hypotheses
            .iter()
            .find(|h| h.names.iter().any(|n| n == name))
            .map(|h| h.type_expr.as_str())
    }
}

/// Collapses every whitespace run to a single space and trims the ends.
pub fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

const COMPLETE_MARKERS: &[&str] = &["No more subgoals.", "No more goals.", "Proof completed."];

/// Parses `N subgoal(s)` / `N goal(s)`, optionally followed by `(ID k)`.
fn parse_header(line: &str) -> Option<usize> {
    let mut words = line.split_whitespace();
    let n = words.next()?.parse().ok()?;
    match words.next()? {
        "subgoal" | "subgoals" | "goal" | "goals" => {}
        _ => return None,
    }
    let rest: Vec<_> = words.collect();
    let tail_ok = rest.is_empty() || (rest.len() == 2 && rest[0] == "(ID" && rest[1].ends_with(')'));
    tail_ok.then_some(n)
}

/// Recognizes `subgoal K is:` / `goal K is:` / `subgoal K (ID n) is:`.
fn is_goal_heading(line: &str) -> bool {
    let words: Vec<_> = line.split_whitespace().collect();
    matches!(words.first(), Some(&"subgoal") | Some(&"goal"))
        && words.get(1).is_some_and(|w| w.parse::<usize>().is_ok())
        && words.last() == Some(&"is:")
}

fn is_separator(line: &str) -> bool {
    let t = line.trim();
    t.len() >= 4 && t.bytes().all(|b| b == b'=')
}

fn indent_of(line: &str) -> usize {
    line.len() - line.trim_start().len()
}

/// Splits `"P, Q, R : Prop"` into names and type. `x := v : T` keeps
/// `v : T` as the type text.
fn parse_hyp_line(line: &str) -> Option<Hypothesis> {
    let t = line.trim();
    let (names_part, type_part) = match (t.find(" := "), t.find(" : ")) {
        (Some(d), Some(c)) if d < c => (&t[..d], &t[d + 4..]),
        (_, Some(c)) => (&t[..c], &t[c + 3..]),
        (Some(d), None) => (&t[..d], &t[d + 4..]),
        (None, None) => return None,
    };
    let names: Vec<String> = names_part.split(',').map(|n| n.trim().to_string()).collect();
    let valid = |n: &String| {
        let mut chars = n.chars();
        chars.next().is_some_and(|c| c.is_alphabetic() || c == '_')
            && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
    };
    if names.is_empty() || !names.iter().all(valid) || type_part.trim().is_empty() {
        return None;
    }
    Some(Hypothesis {
        names,
        type_expr: type_part.trim().to_string(),
    })
}

fn join_lines(lines: &[&str]) -> String {
    lines
        .iter()
        .map(|l| l.trim())
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses one complete prover response. Lines before the goal header (for
/// example `info_auto` traces) are skipped but kept in `raw`.
pub fn parse_state(raw: &str) -> Result<ProofState> {
    let lines: Vec<&str> = raw.lines().collect();
    let mut idx = 0;
    let count = loop {
        let Some(line) = lines.get(idx) else {
            return Err(Diagnostic::error(Code::MalformedState, "no goal header in prover response"));
        };
        idx += 1;
        let t = line.trim();
        if COMPLETE_MARKERS.contains(&t) {
            return Ok(ProofState {
                subgoal_count: 0,
                hypotheses: Vec::new(),
                goals: Vec::new(),
                raw: raw.to_string(),
            });
        }
        if let Some(n) = parse_header(t) {
            break n;
        }
    };

    let sep = lines[idx..]
        .iter()
        .position(|l| is_separator(l))
        .map(|p| p + idx)
        .ok_or_else(|| {
            Diagnostic::error(Code::MalformedState, format!("{count} goal(s) announced but no `====` separator"))
        })?;

    let mut hypotheses: Vec<Hypothesis> = Vec::new();
    let mut hyp_indent = 0;
    for line in &lines[idx..sep] {
        if line.trim().is_empty() {
            continue;
        }
        if let Some(h) = parse_hyp_line(line) {
            hyp_indent = indent_of(line);
            hypotheses.push(h);
            continue;
        }
        // Wrapped continuation of the previous hypothesis.
        match hypotheses.last_mut() {
            Some(prev) if indent_of(line) > hyp_indent => {
                prev.type_expr.push(' ');
                prev.type_expr.push_str(line.trim());
            }
            _ => {
                return Err(Diagnostic::error(
                    Code::MalformedHyp,
                    format!("cannot parse hypothesis line `{}`", line.trim()),
                ))
            }
        }
    }

    let mut blocks: Vec<Vec<&str>> = vec![Vec::new()];
    for line in &lines[sep + 1..] {
        if is_goal_heading(line) {
            blocks.push(Vec::new());
        } else {
            blocks.last_mut().expect("non-empty").push(line);
        }
    }
    let goals: Vec<String> = blocks.iter().map(|b| join_lines(b)).collect();
    if goals.iter().any(String::is_empty) {
        return Err(Diagnostic::error(Code::MalformedState, "empty goal in prover response"));
    }
    if goals.len() != count {
        return Err(Diagnostic::error(
            Code::MalformedState,
            format!("header announces {count} goal(s) but {} were displayed", goals.len()),
        ));
    }
    Ok(ProofState {
        subgoal_count: count,
        hypotheses,
        goals,
        raw: raw.to_string(),
    })
}

/// Structural equality up to whitespace normalization; `raw` is ignored.
pub fn equal_states(a: &ProofState, b: &ProofState) -> bool {
    a.subgoal_count == b.subgoal_count
        && a.goals.len() == b.goals.len()
        && a.goals.iter().zip(&b.goals).all(|(x, y)| normalize_ws(x) == normalize_ws(y))
        && a.hypotheses.len() == b.hypotheses.len()
        && a.hypotheses.iter().zip(&b.hypotheses).all(|(x, y)| {
            x.names == y.names && normalize_ws(&x.type_expr) == normalize_ws(&y.type_expr)
        })
}

/// Tactics reported by `info_auto` in a response, in order, with
/// `(in db)` suffixes and terminators removed.
pub fn info_auto_trace(raw: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut in_trace = false;
    for line in raw.lines() {
        let t = line.trim();
        if t.starts_with("(* info auto") || t.starts_with("(* info_auto") {
            in_trace = true;
            continue;
        }
        if !in_trace {
            continue;
        }
        if t.is_empty() {
            continue;
        }
        if parse_header(t).is_some() || COMPLETE_MARKERS.contains(&t) {
            break;
        }
        let mut tac = t.trim_end_matches('.').trim();
        if let Some(p) = tac.find(" (in ") {
            tac = tac[..p].trim();
        }
        if tac == "idtac" || tac.is_empty() {
            continue;
        }
        out.push(tac.to_string());
    }
    out
}
