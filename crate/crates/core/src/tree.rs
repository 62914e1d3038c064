//! Proof tree reconstruction from a linear tactic trace.
//!
//! Without explicit focusing the prover always works on the first remaining
//! goal, so a trace can be read as a depth-first walk: a step that turns the
//! focused goal into `k` subgoals opens `k` children, filled left to right,
//! and a step that closes a goal ends the current node.

use std::fmt::Write as _;

use crate::diag::{Code, Diagnostic, Result};
use crate::diff::{diff_states, Classification, StateDiff};
use crate::provider::SessionTrace;
use crate::script::ScriptItem;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub item: ScriptItem,
    pub diff: StateDiff,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofNode {
    pub steps: Vec<ProofStep>,
    /// Goal this node proves, as displayed when its case opened. `None` for
    /// the root.
    pub case_goal: Option<String>,
    pub children: Vec<ProofNode>,
    pub depth: usize,
}

impl ProofNode {
    fn new(depth: usize, case_goal: Option<String>) -> Self {
        ProofNode {
            steps: Vec::new(),
            case_goal,
            children: Vec::new(),
            depth,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn leaf_count(&self) -> usize {
        if self.is_leaf() {
            1
        } else {
            self.children.iter().map(ProofNode::leaf_count).sum()
        }
    }

    /// Steps in depth-first order: own steps, then each child in turn.
    pub fn flatten(&self) -> Vec<&ProofStep> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect<'a>(&'a self, out: &mut Vec<&'a ProofStep>) {
        out.extend(&self.steps);
        for c in &self.children {
            c.collect(out);
        }
    }

    /// Pre-order iterator over this node and its descendants.
    pub fn nodes(&self) -> Vec<&ProofNode> {
        let mut out = vec![self];
        for c in &self.children {
            out.extend(c.nodes());
        }
        out
    }
}

fn malformed(msg: impl Into<String>) -> Diagnostic {
    Diagnostic::error(Code::MalformedTrace, msg)
}

struct Builder<'a> {
    trace: &'a SessionTrace,
    next: usize,
}

impl Builder<'_> {
    fn node(&mut self, depth: usize, case_goal: Option<String>) -> Result<ProofNode> {
        let mut node = ProofNode::new(depth, case_goal);
        loop {
            let i = self.next;
            let Some(step) = self.trace.steps.get(i) else {
                let open = self.trace.final_state().subgoal_count;
                return Err(Diagnostic::error(
                    Code::IncompleteProof,
                    format!("trace ends with {open} open goal(s)"),
                ));
            };
            self.next += 1;
            let before = self.trace.state_before(i);
            let after = &step.state_after;
            if before.subgoal_count == 0 {
                return Err(malformed(format!("tactic `{}` runs after the proof is complete", step.tactic_text()))
                    .with_span(step.item.span));
            }
            let diff = diff_states(before, after);
            let classification = diff.classification;
            if matches!(classification, Classification::Intro | Classification::Transform) && diff.subgoal_delta != 0 {
                return Err(malformed(format!(
                    "tactic `{}` changed the goal count by {}",
                    step.tactic_text(),
                    diff.subgoal_delta
                ))
                .with_span(step.item.span));
            }
            node.steps.push(ProofStep {
                item: step.item.clone(),
                diff,
            });
            match classification {
                Classification::Close => return Ok(node),
                Classification::Branch(k) => {
                    let labels: Vec<String> = after.goals.iter().take(k).cloned().collect();
                    for label in labels {
                        let child = self.node(depth + 1, Some(label))?;
                        node.children.push(child);
                    }
                    return Ok(node);
                }
                Classification::Intro | Classification::Transform => {}
            }
        }
    }
}

/// Rebuilds the bullet structure of `trace`.
///
/// An empty trace yields an empty root so that a bare `Proof. Qed.` still
/// renders.
pub fn build_tree(trace: &SessionTrace) -> Result<ProofNode> {
    if trace.steps.is_empty() {
        return Ok(ProofNode::new(0, None));
    }
    let mut b = Builder { trace, next: 0 };
    let root = b.node(0, None)?;
    if let Some(extra) = trace.steps.get(b.next) {
        return Err(malformed(format!(
            "tactic `{}` runs after every goal was closed",
            extra.tactic_text()
        ))
        .with_span(extra.item.span));
    }
    if !trace.final_state().is_complete() {
        return Err(Diagnostic::error(
            Code::IncompleteProof,
            format!("trace ends with {} open goal(s)", trace.final_state().subgoal_count),
        ));
    }
    Ok(root)
}

/// Case goals of `node`'s children, in prover order.
pub fn case_labels(node: &ProofNode) -> Vec<String> {
    debug_assert!(!node.is_leaf(), "case_labels called on a leaf");
    node.children
        .iter()
        .map(|c| c.case_goal.clone().unwrap_or_default())
        .collect()
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering; each node is labelled with its case goal and first
/// tactic.
pub fn to_dot(root: &ProofNode) -> String {
    let mut out = String::from("digraph proof {\n  node [shape=box, fontname=\"monospace\"];\n");
    let mut next_id = 0usize;
    fn emit(node: &ProofNode, out: &mut String, next_id: &mut usize) -> usize {
        let id = *next_id;
        *next_id += 1;
        let tactic = node.steps.first().map_or("", |s| s.item.source_body());
        let label = match &node.case_goal {
            Some(goal) => format!("Case {}\\n{}", dot_escape(goal), dot_escape(tactic)),
            None => dot_escape(tactic),
        };
        let _ = writeln!(out, "  n{id} [label=\"{label}\"];");
        for child in &node.children {
            let cid = emit(child, out, next_id);
            let _ = writeln!(out, "  n{id} -> n{cid};");
        }
        id
    }
    emit(root, &mut out, &mut next_id);
    out.push_str("}\n");
    out
}
