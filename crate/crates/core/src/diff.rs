//! What a single tactic changed between two consecutive proof states.

use crate::diag::{Code, Diagnostic};
use crate::goal::{normalize_ws, Hypothesis, ProofState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// Goal count unchanged and new bindings appeared.
    Intro,
    /// The focused goal was replaced by `k >= 2` subgoals.
    Branch(usize),
    /// The focused goal was solved.
    Close,
    /// Anything else: goal rewritten in place.
    Transform,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateDiff {
    pub added: Vec<Hypothesis>,
    pub removed: Vec<Hypothesis>,
    pub goal_before: String,
    /// `None` when the tactic closed the focused goal.
    pub goal_after: Option<String>,
    pub subgoal_delta: i64,
    pub classification: Classification,
}

impl StateDiff {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty() && self.subgoal_delta == 0
    }
}

/// One `(name, normalized type)` pair; the unit of hypothesis identity.
type Binding = (String, String);

fn bindings(hyps: &[Hypothesis]) -> Vec<Binding> {
    hyps.iter()
        .flat_map(|h| {
            let ty = normalize_ws(&h.type_expr);
            h.names.iter().map(move |n| (n.clone(), ty.clone()))
        })
        .collect()
}

/// Bindings of `from` missing in `other`, regrouped so that consecutive
/// bindings sharing a type form one [`Hypothesis`] again.
fn missing(from: &[Hypothesis], other: &[Hypothesis]) -> Vec<Hypothesis> {
    let other = bindings(other);
    let mut out: Vec<Hypothesis> = Vec::new();
    for (name, ty) in bindings(from) {
        if other.iter().any(|(n, t)| *n == name && *t == ty) {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.type_expr == ty => last.names.push(name),
            _ => out.push(Hypothesis::new([name], ty)),
        }
    }
    out
}

/// Compares the focused contexts and goal counts of `before` and `after`.
pub fn diff_states(before: &ProofState, after: &ProofState) -> StateDiff {
    let subgoal_delta = after.subgoal_count as i64 - before.subgoal_count as i64;
    let goal_before = before.focused_goal().unwrap_or_default().to_string();
    if subgoal_delta == -1 {
        // The next focused goal belongs to a sibling branch; its context is
        // not comparable with the closed one.
        return StateDiff {
            added: Vec::new(),
            removed: Vec::new(),
            goal_before,
            goal_after: None,
            subgoal_delta,
            classification: Classification::Close,
        };
    }
    let added = missing(&after.hypotheses, &before.hypotheses);
    let removed = missing(&before.hypotheses, &after.hypotheses);
    let classification = match subgoal_delta {
        d if d >= 1 => Classification::Branch(d as usize + 1),
        0 if !added.is_empty() => Classification::Intro,
        _ => Classification::Transform,
    };
    StateDiff {
        added,
        removed,
        goal_before,
        goal_after: after.focused_goal().map(str::to_string),
        subgoal_delta,
        classification,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BindingClasses {
    /// Objects introduced as arbitrary values of some type.
    pub variables: Vec<Hypothesis>,
    /// Facts assumed true.
    pub hypotheses: Vec<Hypothesis>,
    /// Warnings for bindings classified by the fallback rule.
    pub warnings: Vec<Diagnostic>,
}

const SORTS: &[&str] = &["Prop", "Set", "Type", "SProp"];
const PROP_TOKENS: &[&str] = &["->", "/\\", "\\/", "<->", "~", "=", "<>", "<", "<=", ">", ">=", "forall", "exists", "True", "False"];

fn is_sort(ty: &str) -> bool {
    SORTS.contains(&ty) || ty.starts_with("Type@{") || ty.starts_with("Set@{")
}

/// Splits freshly introduced bindings into variables and hypotheses.
///
/// A binding is a variable when its type is a sort, or an identifier bound
/// (in `before` or earlier in `added`) to a non-`Prop` sort. It is a
/// hypothesis when its type mentions a logical connective or is an
/// identifier bound to `Prop`. Anything else falls back to hypothesis with a
/// `HEURISTIC_CLASSIFICATION` warning.
pub fn classify_bindings(added: &[Hypothesis], before: &ProofState) -> BindingClasses {
    let mut known: Vec<Binding> = bindings(&before.hypotheses);
    let mut out = BindingClasses::default();
    for hyp in added {
        let ty = normalize_ws(&hyp.type_expr);
        let bound_sort = known.iter().rev().find(|(n, _)| *n == ty).map(|(_, t)| t.as_str());
        let is_variable = is_sort(&ty) || bound_sort.is_some_and(|s| s != "Prop" && is_sort(s));
        let prop_like = bound_sort == Some("Prop")
            || ty.split(|c: char| c.is_whitespace() || c == '(' || c == ')').any(|tok| PROP_TOKENS.contains(&tok))
            || ty.contains("->")
            || ty.contains("/\\")
            || ty.contains("\\/");
        if is_variable {
            out.variables.push(hyp.clone());
        } else {
            if !prop_like {
                out.warnings.push(Diagnostic::warning(
                    Code::HeuristicClassification,
                    format!(
                        "cannot tell whether {} : {} is an object or a fact; treating it as a hypothesis",
                        hyp.names.join(", "),
                        ty
                    ),
                ));
            }
            out.hypotheses.push(hyp.clone());
        }
        known.extend(hyp.names.iter().map(|n| (n.clone(), ty.clone())));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::goal::parse_state;
    use proptest::prelude::*;

    fn state(hyps: &[(&[&str], &str)], goals: &[&str]) -> ProofState {
        ProofState {
            subgoal_count: goals.len(),
            hypotheses: hyps.iter().map(|(n, t)| Hypothesis::new(n.iter().copied(), *t)).collect(),
            goals: goals.iter().map(|g| g.to_string()).collect(),
            raw: String::new(),
        }
    }

    #[test]
    fn intros_adds_variables() {
        let before = parse_state("1 subgoal\n  \n  ============================\n  forall P Q R : Prop, (P /\\ Q -> R) <-> (P -> Q -> R)\n").unwrap();
        let after = parse_state("1 subgoal\n  \n  P, Q, R : Prop\n  ============================\n  (P /\\ Q -> R) <-> (P -> Q -> R)\n").unwrap();
        let d = diff_states(&before, &after);
        assert_eq!(d.added, [Hypothesis::new(["P", "Q", "R"], "Prop")]);
        assert!(d.removed.is_empty());
        assert_eq!(d.goal_after.as_deref(), Some("(P /\\ Q -> R) <-> (P -> Q -> R)"));
        assert_eq!(d.subgoal_delta, 0);
        assert_eq!(d.classification, Classification::Intro);
    }

    #[test]
    fn reflexive_diff_is_empty_transform() {
        let s = state(&[(&["P"], "Prop")], &["P"]);
        let d = diff_states(&s, &s);
        assert!(d.is_empty());
        assert_eq!(d.classification, Classification::Transform);
    }

    #[test]
    fn split_branches() {
        let before = state(&[(&["P", "Q", "R"], "Prop")], &["(P /\\ Q -> R) <-> (P -> Q -> R)"]);
        let after = state(
            &[(&["P", "Q", "R"], "Prop")],
            &["(P /\\ Q -> R) -> P -> Q -> R", "(P -> Q -> R) -> P /\\ Q -> R"],
        );
        let d = diff_states(&before, &after);
        assert_eq!(d.subgoal_delta, 1);
        assert_eq!(d.classification, Classification::Branch(2));
    }

    #[test]
    fn close_has_no_goal_after() {
        let before = state(&[(&["P"], "Prop"), (&["HP"], "P")], &["P", "Q"]);
        let after = state(&[(&["Q"], "Prop")], &["Q"]);
        let d = diff_states(&before, &after);
        assert_eq!(d.classification, Classification::Close);
        assert_eq!(d.goal_after, None);
        assert!(d.added.is_empty());
    }

    #[test]
    fn regrouping_by_name() {
        let before = state(&[(&["P", "Q"], "Prop")], &["G"]);
        let after = state(&[(&["P", "Q", "R"], "Prop")], &["G"]);
        let d = diff_states(&before, &after);
        assert_eq!(d.added, [Hypothesis::new(["R"], "Prop")]);
        assert!(d.removed.is_empty());
    }

    #[test]
    fn classify_examples() {
        let empty = state(&[], &["G"]);
        let c = classify_bindings(&[Hypothesis::new(["P", "Q", "R"], "Prop")], &empty);
        assert_eq!(c.variables.len(), 1);
        assert!(c.hypotheses.is_empty());

        let ctx = state(&[(&["P", "Q", "R"], "Prop")], &["G"]);
        let added = [
            Hypothesis::new(["H"], "P /\\ Q -> R"),
            Hypothesis::new(["HP"], "P"),
            Hypothesis::new(["HQ"], "Q"),
        ];
        let c = classify_bindings(&added, &ctx);
        assert!(c.variables.is_empty());
        assert_eq!(c.hypotheses, added);
        assert!(c.warnings.is_empty());

        assert_eq!(classify_bindings(&[], &ctx), BindingClasses::default());
    }

    #[test]
    fn type_variables_and_fallback() {
        let ctx = state(&[(&["A"], "Type")], &["G"]);
        let c = classify_bindings(&[Hypothesis::new(["x", "y"], "A"), Hypothesis::new(["n"], "nat")], &ctx);
        assert_eq!(c.variables, [Hypothesis::new(["x", "y"], "A")]);
        assert_eq!(c.hypotheses, [Hypothesis::new(["n"], "nat")]);
        assert_eq!(c.warnings.len(), 1);
        assert_eq!(c.warnings[0].code, Code::HeuristicClassification);
    }

    fn hyp_strategy() -> impl Strategy<Value = Hypothesis> {
        (
            proptest::collection::vec("[A-Z][0-9]?", 1..3),
            prop_oneof![
                Just("Prop".to_string()),
                Just("Type".to_string()),
                Just("P".to_string()),
                Just("nat".to_string()),
                Just("P /\\ Q".to_string()),
                Just("P -> Q".to_string()),
            ],
        )
            .prop_map(|(names, ty)| Hypothesis::new(names, ty))
    }

    proptest! {
        #[test]
        fn classification_partitions(added in proptest::collection::vec(hyp_strategy(), 0..6)) {
            let ctx = state(&[(&["P", "Q"], "Prop")], &["G"]);
            let c = classify_bindings(&added, &ctx);
            prop_assert_eq!(c.variables.len() + c.hypotheses.len(), added.len());
            let (mut vi, mut hi) = (0, 0);
            for h in &added {
                if c.variables.get(vi) == Some(h) { vi += 1; }
                else if c.hypotheses.get(hi) == Some(h) { hi += 1; }
                else { prop_assert!(false, "binding dropped"); }
            }
        }

        #[test]
        fn added_and_removed_are_antisymmetric(
            a in proptest::collection::vec(hyp_strategy(), 0..5),
            b in proptest::collection::vec(hyp_strategy(), 0..5),
        ) {
            let sa = ProofState { subgoal_count: 1, hypotheses: a, goals: vec!["G".into()], raw: String::new() };
            let sb = ProofState { subgoal_count: 1, hypotheses: b, goals: vec!["G".into()], raw: String::new() };
            let ab = diff_states(&sa, &sb);
            let ba = diff_states(&sb, &sa);
            prop_assert_eq!(&ab.added, &ba.removed);
            prop_assert_eq!(&ab.removed, &ba.added);
            prop_assert!(diff_states(&sa, &sa).is_empty());
        }
    }
}
