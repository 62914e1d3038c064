//! Sources of proof-state sequences: a live prover process or a recorded
//! `.cqtrace` fixture.

mod fixture;
mod live;

pub use fixture::{read_fixture, record_session, run_replay, write_fixture, RawSession, RawStep};
pub use live::{prover_version, run_live, ProverConfig, ProverSession, DEFAULT_TIMEOUT};

use crate::goal::ProofState;
use crate::script::ScriptItem;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub item: ScriptItem,
    pub state_after: ProofState,
}

impl TraceStep {
    pub fn tactic_text(&self) -> &str {
        self.item.body()
    }
}

/// A lemma and the state after each of its tactics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionTrace {
    pub lemma: String,
    /// State right after the lemma statement was accepted.
    pub initial: ProofState,
    pub steps: Vec<TraceStep>,
    pub prover_version: Option<String>,
}

impl SessionTrace {
    /// State in force when step `i` runs.
    pub fn state_before(&self, i: usize) -> &ProofState {
        match i {
            0 => &self.initial,
            _ => &self.steps[i - 1].state_after,
        }
    }

    pub fn final_state(&self) -> &ProofState {
        self.steps.last().map_or(&self.initial, |s| &s.state_after)
    }

    /// Every state in order, starting with the initial one.
    pub fn states(&self) -> impl Iterator<Item = &ProofState> {
        std::iter::once(&self.initial).chain(self.steps.iter().map(|s| &s.state_after))
    }

    /// Equality under [`equal_states`](crate::goal::equal_states) on every
    /// state, plus matching tactic text.
    pub fn equivalent(&self, other: &SessionTrace) -> bool {
        use crate::goal::{equal_states, normalize_ws};
        self.steps.len() == other.steps.len()
            && equal_states(&self.initial, &other.initial)
            && self.steps.iter().zip(&other.steps).all(|(a, b)| {
                normalize_ws(a.tactic_text()) == normalize_ws(b.tactic_text())
                    && equal_states(&a.state_after, &b.state_after)
            })
    }
}
