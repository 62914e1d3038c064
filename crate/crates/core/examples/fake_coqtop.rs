//! A stand-in for `coqtop -emacs` that answers from a recorded session.
//!
//! Environment:
//! - `FAKE_COQTOP_TRACE`: the `.cqtrace` file to answer from.
//! - `FAKE_COQTOP_LOG`: append every received sentence here, one per line.
//! - `FAKE_COQTOP_FAIL_AT`: tactic index that fails with an error.
//!
//! A tactic that differs from the recorded one is rejected the way the real
//! prover rejects an unknown tactic.

use std::env;
use std::fs::{self, OpenOptions};
use std::io::{self, BufRead, Write};

use coqatoo::goal::normalize_ws;
use coqatoo::provider::read_fixture;

const LEMMA_KEYWORDS: &[&str] = &["Lemma", "Theorem", "Example", "Fact", "Remark", "Corollary", "Proposition", "Goal"];

fn prompt(n: usize) {
    let mut err = io::stderr().lock();
    let _ = write!(err, "<prompt>Coq < {n} || 0 < </prompt>");
    let _ = err.flush();
}

fn main() {
    if env::args().any(|a| a == "--version") {
        println!("The Coq Proof Assistant, version 8.6 (fake)");
        return;
    }
    let trace_path = env::var("FAKE_COQTOP_TRACE").expect("FAKE_COQTOP_TRACE is not set");
    let session = read_fixture(&fs::read_to_string(&trace_path).expect("cannot read trace"))
        .unwrap_or_else(|d| panic!("{d}"));
    let fail_at: Option<usize> = env::var("FAKE_COQTOP_FAIL_AT").ok().and_then(|v| v.parse().ok());
    let mut log = env::var("FAKE_COQTOP_LOG")
        .ok()
        .map(|p| OpenOptions::new().create(true).append(true).open(p).expect("cannot open log"));

    let mut next = 0;
    let mut in_proof = false;
    prompt(0);
    for line in io::stdin().lock().lines() {
        let Ok(line) = line else { break };
        let sentence = normalize_ws(&line);
        if sentence.is_empty() {
            continue;
        }
        if let Some(log) = log.as_mut() {
            let _ = writeln!(log, "{sentence}");
        }
        let head = sentence.split_whitespace().next().unwrap_or_default();
        let response = if LEMMA_KEYWORDS.contains(&head) {
            in_proof = true;
            session.initial_raw_state.clone()
        } else if !in_proof {
            String::new()
        } else {
            let body = sentence.trim_end_matches('.');
            match session.steps.get(next) {
                _ if fail_at == Some(next) => format!("Toplevel input, characters 0-{}:\nError: Simulated failure.\n", body.len()),
                Some(step) if normalize_ws(&step.tactic) == body => {
                    next += 1;
                    step.raw_state.clone()
                }
                _ => format!("Toplevel input, characters 0-{}:\nError: Unexpected tactic {body}.\n", body.len()),
            }
        };
        let mut out = io::stdout().lock();
        let _ = out.write_all(response.as_bytes());
        let _ = out.flush();
        prompt(next + 1);
    }
}
