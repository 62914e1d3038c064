//! `.cqtrace` fixtures: line-delimited JSON, a header record followed by one
//! record per executed tactic. States are stored as raw prover text and
//! parsed on load.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{SessionTrace, TraceStep};
use crate::diag::{Code, Diagnostic, Result};
use crate::goal::{normalize_ws, parse_state};
use crate::script::{split_first_lemma, ScriptItem};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HeaderRecord {
    lemma: String,
    initial_raw_state: String,
    #[serde(default)]
    prover_version: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawStep {
    pub tactic: String,
    pub raw_state: String,
}

/// A fixture before its states are parsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSession {
    pub lemma: String,
    pub initial_raw_state: String,
    pub prover_version: Option<String>,
    pub steps: Vec<RawStep>,
}

fn parse_error(line: usize, msg: impl std::fmt::Display) -> Diagnostic {
    Diagnostic::error(Code::FixtureParse, format!("fixture line {line}: {msg}"))
}

pub fn read_fixture(text: &str) -> Result<RawSession> {
    let mut records = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (n, first) = records
        .next()
        .ok_or_else(|| Diagnostic::error(Code::FixtureParse, "fixture is empty"))?;
    let header: HeaderRecord = serde_json::from_str(first).map_err(|e| parse_error(n + 1, e))?;
    let steps = records
        .map(|(n, l)| serde_json::from_str::<RawStep>(l).map_err(|e| parse_error(n + 1, e)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RawSession {
        lemma: header.lemma,
        initial_raw_state: header.initial_raw_state,
        prover_version: header.prover_version,
        steps,
    })
}

pub fn write_fixture(session: &RawSession) -> String {
    let header = HeaderRecord {
        lemma: session.lemma.clone(),
        initial_raw_state: session.initial_raw_state.clone(),
        prover_version: session.prover_version.clone(),
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for step in &session.steps {
        out.push_str(&serde_json::to_string(step).expect("step serializes"));
        out.push('\n');
    }
    out
}

/// Loads the trace recorded in `fixture_path`, checking that it was recorded
/// for the same tactic sequence as `items`.
pub fn run_replay(items: &[ScriptItem], fixture_path: &Path) -> Result<SessionTrace> {
    let text = fs::read_to_string(fixture_path).map_err(|e| {
        Diagnostic::error(Code::Io, format!("cannot read fixture {}: {e}", fixture_path.display()))
    })?;
    let raw = read_fixture(&text)?;
    let tactics = split_first_lemma(items)?.tactics();

    let divergence = tactics
        .iter()
        .zip(&raw.steps)
        .position(|(item, step)| normalize_ws(item.body()) != normalize_ws(&step.tactic))
        .or_else(|| (tactics.len() != raw.steps.len()).then(|| tactics.len().min(raw.steps.len())));
    if let Some(i) = divergence {
        let script = tactics.get(i).map_or("<end of script>".to_string(), |t| format!("`{}`", t.body()));
        let recorded = raw.steps.get(i).map_or("<end of fixture>".to_string(), |s| format!("`{}`", s.tactic));
        let mut d = Diagnostic::error(
            Code::FixtureMismatch,
            format!("fixture diverges from script at tactic index {i}: script has {script}, fixture has {recorded}"),
        );
        if let Some(t) = tactics.get(i) {
            d = d.with_span(t.span);
        }
        return Err(d);
    }

    let initial = parse_state(&raw.initial_raw_state)?;
    let steps = tactics
        .into_iter()
        .zip(raw.steps)
        .map(|(item, step)| {
            let state_after = parse_state(&step.raw_state).map_err(|d| d.with_span(item.span))?;
            Ok(TraceStep { item, state_after })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SessionTrace {
        lemma: raw.lemma,
        initial,
        steps,
        prover_version: raw.prover_version,
    })
}

/// Writes `trace` as a fixture that [`run_replay`] reads back.
pub fn record_session(trace: &SessionTrace, out_path: &Path) -> Result<()> {
    let raw = RawSession {
        lemma: normalize_ws(&trace.lemma),
        initial_raw_state: trace.initial.raw.clone(),
        prover_version: trace.prover_version.clone(),
        steps: trace
            .steps
            .iter()
            .map(|s| RawStep {
                tactic: normalize_ws(s.tactic_text()),
                raw_state: s.state_after.raw.clone(),
            })
            .collect(),
    };
    fs::write(out_path, write_fixture(&raw)).map_err(|e| {
        Diagnostic::error(Code::Io, format!("cannot write fixture {}: {e}", out_path.display()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::script::tokenize_script;

    const SCRIPT: &str = "Lemma t : True /\\ True. Proof. split. exact I. exact I. Qed.";

    fn session() -> RawSession {
        RawSession {
            lemma: "Lemma t : True /\\ True.".into(),
            initial_raw_state: "1 subgoal\n  \n  ============================\n  True /\\ True\n".into(),
            prover_version: Some("8.9.1".into()),
            steps: vec![
                RawStep {
                    tactic: "split".into(),
                    raw_state: "2 subgoals\n  \n  ============================\n  True\n\nsubgoal 2 is:\n True\n".into(),
                },
                RawStep {
                    tactic: "exact I".into(),
                    raw_state: "1 subgoal\n  \n  ============================\n  True\n".into(),
                },
                RawStep {
                    tactic: "exact  I".into(),
                    raw_state: "No more subgoals.\n".into(),
                },
            ],
        }
    }

    fn write(dir: &tempfile::TempDir, text: &str) -> std::path::PathBuf {
        let p = dir.path().join("t.cqtrace");
        fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn replay_matches_script() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(&dir, &write_fixture(&session()));
        let items = tokenize_script(SCRIPT).unwrap().items;
        let trace = run_replay(&items, &path).unwrap();
        assert_eq!(trace.steps.len(), 3);
        let counts: Vec<_> = trace.states().map(|s| s.subgoal_count).collect();
        assert_eq!(counts, [1, 2, 1, 0]);
        assert_eq!(trace.steps[0].item.body(), "split");

        let out = dir.path().join("again.cqtrace");
        record_session(&trace, &out).unwrap();
        assert!(run_replay(&items, &out).unwrap().equivalent(&trace));
    }

    #[test]
    fn reordered_steps_mismatch_at_zero() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = session();
        s.steps.swap(0, 1);
        let path = write(&dir, &write_fixture(&s));
        let items = tokenize_script(SCRIPT).unwrap().items;
        let e = run_replay(&items, &path).unwrap_err();
        assert_eq!(e.code, Code::FixtureMismatch);
        assert!(e.message.contains("index 0"), "{}", e.message);
    }

    #[test]
    fn length_mismatch_reports_first_missing_index() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = session();
        s.steps.pop();
        let path = write(&dir, &write_fixture(&s));
        let items = tokenize_script(SCRIPT).unwrap().items;
        let e = run_replay(&items, &path).unwrap_err();
        assert_eq!(e.code, Code::FixtureMismatch);
        assert!(e.message.contains("index 2"), "{}", e.message);
    }

    #[test]
    fn truncated_fixture_fails_to_parse() {
        let dir = tempfile::tempdir().unwrap();
        let full = write_fixture(&session());
        let path = write(&dir, &full[..full.len() - 20]);
        let items = tokenize_script(SCRIPT).unwrap().items;
        assert_eq!(run_replay(&items, &path).unwrap_err().code, Code::FixtureParse);
        let path = write(&dir, "");
        assert_eq!(run_replay(&items, &path).unwrap_err().code, Code::FixtureParse);
        let missing = dir.path().join("nope.cqtrace");
        assert_eq!(run_replay(&items, &missing).unwrap_err().code, Code::Io);
    }

    #[test]
    fn empty_proof_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let items = tokenize_script("Lemma t : True. Proof. Qed.").unwrap().items;
        let trace = SessionTrace {
            lemma: "Lemma t : True.".into(),
            initial: parse_state("1 subgoal\n\n  ======\n  True\n").unwrap(),
            steps: Vec::new(),
            prover_version: None,
        };
        let out = dir.path().join("e.cqtrace");
        record_session(&trace, &out).unwrap();
        let back = run_replay(&items, &out).unwrap();
        assert!(back.steps.is_empty());
        assert!(back.equivalent(&trace));
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let trace = SessionTrace {
            lemma: "Lemma t : True.".into(),
            initial: parse_state("No more subgoals.").unwrap(),
            steps: Vec::new(),
            prover_version: None,
        };
        let bad = dir.path().join("missing-dir").join("x.cqtrace");
        assert_eq!(record_session(&trace, &bad).unwrap_err().code, Code::Io);
    }
}
