//! Per-tactic rewriting rules.

use std::collections::BTreeMap;

use super::templates::TemplateSet;
use crate::diag::{Code, Diagnostic, Result};
use crate::diff::{classify_bindings, Classification, StateDiff};
use crate::goal::{info_auto_trace, normalize_ws, Hypothesis, ProofState};
use crate::provider::SessionTrace;
use crate::script::ScriptItem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnnotationKind {
    Explain,
    CaseLabel,
    GoalRestate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    pub sentences: Vec<String>,
    /// `seq` of the annotated script item.
    pub attach_to: usize,
    pub kind: AnnotationKind,
    /// The tactic has no rule; renderers may mark the gap.
    pub unsupported: bool,
}

impl Annotation {
    fn explain(attach_to: usize, sentences: Vec<String>) -> Self {
        Annotation {
            sentences,
            attach_to,
            kind: AnnotationKind::Explain,
            unsupported: false,
        }
    }

    pub fn is_silent(&self) -> bool {
        self.sentences.is_empty()
    }
}

/// Splits `A1 -> ... -> An -> C` on top-level arrows. `<->` is not an
/// arrow.
pub fn split_implication(ty: &str) -> Vec<String> {
    let ty = strip_outer_parens(ty.trim());
    let bytes = ty.as_bytes();
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' | b'[' | b'{' => depth += 1,
            b')' | b']' | b'}' => depth = depth.saturating_sub(1),
            b'-' if depth == 0 && bytes.get(i + 1) == Some(&b'>') && (i == 0 || bytes[i - 1] != b'<') => {
                parts.push(ty[start..i].trim().to_string());
                start = i + 2;
                i += 2;
                continue;
            }
            _ => {}
        }
        i += 1;
    }
    parts.push(ty[start..].trim().to_string());
    parts
}

fn strip_outer_parens(s: &str) -> &str {
    let mut s = s;
    while s.starts_with('(') && s.ends_with(')') {
        // Only strip when the opening paren closes at the very end.
        let mut depth = 0usize;
        let closes_at_end = s.char_indices().all(|(i, c)| {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            depth > 0 || i == s.len() - 1
        });
        if !closes_at_end {
            break;
        }
        s = s[1..s.len() - 1].trim();
    }
    s
}

/// First argument of a tactic: `apply H` gives `H`.
fn argument(item: &ScriptItem) -> Option<&str> {
    item.body().split_whitespace().nth(1)
}

/// Produces annotations for tactics, collecting non-fatal warnings.
pub struct Rewriter<'t> {
    templates: &'t TemplateSet,
    warnings: Vec<Diagnostic>,
}

impl<'t> Rewriter<'t> {
    pub fn new(templates: &'t TemplateSet) -> Self {
        Rewriter {
            templates,
            warnings: Vec::new(),
        }
    }

    pub fn warnings(&self) -> &[Diagnostic] {
        &self.warnings
    }

    pub fn into_warnings(self) -> Vec<Diagnostic> {
        self.warnings
    }

    /// Annotation for a single tactic. `before` is the context it ran in and
    /// `after` the prover's response to it.
    pub fn rewrite_step(
        &mut self,
        item: &ScriptItem,
        diff: &StateDiff,
        before: &ProofState,
        after: &ProofState,
    ) -> Result<Annotation> {
        debug_assert!(item.is_tactic());
        let t = self.templates;
        let seq = item.seq;
        let sentences = match item.head() {
            Some("intros") => self.intros(item, diff, before)?,
            Some("assumption") => t.fill("assumption.default", &[])?,
            Some("apply") => self.apply(item, before)?,
            Some("inversion") => self.inversion(item, diff, before)?,
            Some("split") => Vec::new(),
            Some("info_auto") | Some("auto") => self.auto(diff, after)?,
            head => {
                self.warnings.push(
                    Diagnostic::warning(
                        Code::UnsupportedTactic,
                        format!("no rewriting rule for tactic `{}`", head.unwrap_or(item.body())),
                    )
                    .with_span(item.span),
                );
                let mut a = Annotation::explain(seq, Vec::new());
                a.unsupported = true;
                return Ok(a);
            }
        };
        Ok(Annotation::explain(seq, sentences))
    }

    fn intros(&mut self, item: &ScriptItem, diff: &StateDiff, before: &ProofState) -> Result<Vec<String>> {
        let t = self.templates;
        let classes = classify_bindings(&diff.added, before);
        self.warnings
            .extend(classes.warnings.into_iter().map(|w| w.with_span(item.span)));
        let goal = diff.goal_after.as_deref().unwrap_or(&diff.goal_before);

        let var_names: Vec<&str> = classes
            .variables
            .iter()
            .flat_map(|h| h.names.iter().map(String::as_str))
            .collect();
        let mut var_types: Vec<&str> = Vec::new();
        for h in &classes.variables {
            if !var_types.contains(&h.type_expr.as_str()) {
                var_types.push(&h.type_expr);
            }
        }
        // Shorter statements first, stable on ties.
        let mut hyp_types: Vec<&Hypothesis> = classes.hypotheses.iter().collect();
        hyp_types.sort_by_key(|h| normalize_ws(&h.type_expr).len());
        let hyp_types: Vec<String> = hyp_types.iter().map(|h| normalize_ws(&h.type_expr)).collect();

        let list = t.join_list(&var_names)?;
        let types = t.join_list(&var_types)?;
        let hyps = t.join_list(&hyp_types)?;
        match (var_names.len(), hyp_types.len()) {
            (0, 0) => t.fill("intros.none", &[("goal", goal)]),
            (1, 0) => t.fill("intros.variable", &[("list", &list), ("type", &types), ("goal", goal)]),
            (_, 0) => t.fill("intros.variables", &[("list", &list), ("type", &types), ("goal", goal)]),
            (0, 1) => t.fill("intros.hypothesis", &[("list", &hyps), ("goal", goal)]),
            (0, _) => t.fill("intros.hypotheses", &[("list", &hyps), ("goal", goal)]),
            _ => t.fill(
                "intros.mixed",
                &[("list", &list), ("type", &types), ("hyp", &hyps), ("goal", goal)],
            ),
        }
    }

    fn apply(&self, item: &ScriptItem, before: &ProofState) -> Result<Vec<String>> {
        let t = self.templates;
        // Global lemmas and constructors are applied silently.
        let Some(ty) = argument(item).and_then(|name| before.lookup(name)) else {
            return Ok(Vec::new());
        };
        let hyp = normalize_ws(ty);
        let mut parts = split_implication(&hyp);
        let consequent = parts.pop().unwrap_or_default();
        let antecedents = t.join_list(&parts)?;
        let values = [
            ("hyp", hyp.as_str()),
            ("consequent", consequent.as_str()),
            ("antecedents", antecedents.as_str()),
        ];
        match parts.len() {
            0 => t.fill("apply.hypothesis.direct", &values[..2]),
            1 => t.fill("apply.hypothesis.single", &values),
            _ => t.fill("apply.hypothesis.multiple", &values),
        }
    }

    fn inversion(&self, item: &ScriptItem, diff: &StateDiff, before: &ProofState) -> Result<Vec<String>> {
        let t = self.templates;
        let Some(target) = argument(item) else {
            return Ok(Vec::new());
        };
        let ty = normalize_ws(before.lookup(target).unwrap_or(target));
        // Machine-chosen names are not reported, only what they state.
        let facts: Vec<String> = diff
            .added
            .iter()
            .flat_map(|h| h.names.iter().map(move |_| normalize_ws(&h.type_expr)))
            .collect();
        match facts.len() {
            0 if diff.classification == Classification::Close => t.fill("inversion.closed", &[("type", &ty)]),
            0 => Ok(Vec::new()),
            1 => t.fill("inversion.single", &[("type", &ty), ("list", &facts[0])]),
            _ => t.fill("inversion.default", &[("type", &ty), ("list", &facts.join(", "))]),
        }
    }

    fn auto(&self, diff: &StateDiff, after: &ProofState) -> Result<Vec<String>> {
        let t = self.templates;
        let used = info_auto_trace(&after.raw);
        if diff.classification == Classification::Close {
            let list = if used.is_empty() { "auto".to_string() } else { t.join_list(&used)? };
            t.fill("auto.solved", &[("list", &list), ("goal", &diff.goal_before)])
        } else {
            t.fill("auto.nothing", &[("goal", &diff.goal_before)])
        }
    }

    /// `Case <goal>:` label for a branch.
    pub fn case_label(&self, goal: &str, attach_to: usize) -> Result<Annotation> {
        Ok(Annotation {
            sentences: vec![self.templates.fill_line("case.label", &[("goal", &normalize_ws(goal))])?],
            attach_to,
            kind: AnnotationKind::CaseLabel,
            unsupported: false,
        })
    }

    /// Annotations for every step of `trace`, keyed by item `seq`.
    pub fn annotate_trace(&mut self, trace: &SessionTrace) -> Result<BTreeMap<usize, Annotation>> {
        let mut out = BTreeMap::new();
        for (i, step) in trace.steps.iter().enumerate() {
            let before = trace.state_before(i);
            let diff = crate::diff::diff_states(before, &step.state_after);
            let a = self.rewrite_step(&step.item, &diff, before, &step.state_after)?;
            out.insert(step.item.seq, a);
        }
        Ok(out)
    }
}

/// One-shot form of [`Rewriter::rewrite_step`], returning the warnings it
/// raised alongside the annotation.
pub fn rewrite_step(
    item: &ScriptItem,
    diff: &StateDiff,
    before: &ProofState,
    after: &ProofState,
    templates: &TemplateSet,
) -> Result<(Annotation, Vec<Diagnostic>)> {
    let mut r = Rewriter::new(templates);
    let a = r.rewrite_step(item, diff, before, after)?;
    Ok((a, r.into_warnings()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff::diff_states;
    use crate::goal::parse_state;
    use crate::script::{tokenize_script, ItemKind};

    fn tactic(text: &str) -> ScriptItem {
        let s = tokenize_script(&format!("Lemma t : True. Proof. {text}. Qed.")).unwrap();
        s.items.into_iter().find(|i| i.kind == ItemKind::Tactic).unwrap()
    }

    fn st(hyps: &str, goals: &[&str]) -> ProofState {
        if goals.is_empty() {
            return parse_state("No more subgoals.").unwrap();
        }
        let mut raw = format!("{} subgoal{}\n  \n", goals.len(), if goals.len() > 1 { "s" } else { "" });
        for h in hyps.lines() {
            raw.push_str(&format!("  {h}\n"));
        }
        raw.push_str(&format!("  ============================\n  {}\n", goals[0]));
        for (i, g) in goals.iter().enumerate().skip(1) {
            raw.push_str(&format!("\nsubgoal {} is:\n {g}\n", i + 1));
        }
        parse_state(&raw).unwrap()
    }

    fn run(text: &str, before: &ProofState, after: &ProofState) -> (Annotation, Vec<Diagnostic>) {
        let t = TemplateSet::builtin("en").unwrap();
        let diff = diff_states(before, after);
        rewrite_step(&tactic(text), &diff, before, after, &t).unwrap()
    }

    fn sentence(text: &str, before: &ProofState, after: &ProofState) -> String {
        run(text, before, after).0.sentences.join(" ")
    }

    #[test]
    fn intros_variables() {
        let before = st("", &["forall P Q R : Prop, (P /\\ Q -> R) <-> (P -> Q -> R)"]);
        let after = st("P, Q, R : Prop", &["(P /\\ Q -> R) <-> (P -> Q -> R)"]);
        let (a, w) = run("intros", &before, &after);
        assert_eq!(
            a.sentences,
            [
                "Assume that P, Q and R are arbitrary objects of type Prop.",
                "Let us show that (P /\\ Q -> R) <-> (P -> Q -> R) is true."
            ]
        );
        assert!(w.is_empty());
        assert_eq!(a.kind, AnnotationKind::Explain);
    }

    #[test]
    fn intros_hypotheses_sorted_by_length() {
        let before = st("P, Q, R : Prop", &["(P /\\ Q -> R) -> P -> Q -> R", "X"]);
        let after = st("P, Q, R : Prop\nH : P /\\ Q -> R\nHP : P\nHQ : Q", &["R", "X"]);
        assert_eq!(
            sentence("intros H HP HQ", &before, &after),
            "Suppose that P, Q and P /\\ Q -> R are true. Let us show that R is true."
        );
        let before = st("P, Q, R : Prop", &["(P -> Q -> R) -> P /\\ Q -> R"]);
        let after = st("P, Q, R : Prop\nH : P -> Q -> R\nHPQ : P /\\ Q", &["R"]);
        assert_eq!(
            sentence("intros H HPQ", &before, &after),
            "Suppose that P /\\ Q and P -> Q -> R are true. Let us show that R is true."
        );
    }

    #[test]
    fn intros_mixed_and_single() {
        let before = st("", &["forall A B : Prop, A /\\ B -> B /\\ A"]);
        let after = st("A, B : Prop\nH : A /\\ B", &["B /\\ A"]);
        assert_eq!(
            sentence("intros A B H", &before, &after),
            "Let A and B be of type Prop and assume A /\\ B. Let us show that B /\\ A is true."
        );
        let before = st("P : Prop", &["P -> P"]);
        let after = st("P : Prop\nH : P", &["P"]);
        assert_eq!(sentence("intros H", &before, &after), "Suppose that P is true. Let us show that P is true.");
    }

    #[test]
    fn assumption_sentence() {
        let before = st("P : Prop\nHP : P", &["P"]);
        let after = st("", &[]);
        assert_eq!(sentence("assumption", &before, &after), "True, because it is one of our assumptions.");
    }

    #[test]
    fn apply_local_and_global() {
        let ctx = "P, Q, R : Prop\nH : P /\\ Q -> R\nHP : P\nHQ : Q";
        let before = st(ctx, &["R", "X"]);
        let after = st(ctx, &["P /\\ Q", "X"]);
        assert_eq!(
            sentence("apply H", &before, &after),
            "By our hypothesis P /\\ Q -> R, we know that R is true if P /\\ Q is true."
        );
        let branched = st(ctx, &["P", "Q", "X"]);
        let (a, w) = run("apply conj", &after, &branched);
        assert!(a.is_silent() && w.is_empty());

        let ctx = "P, Q, R : Prop\nH : P -> Q -> R\nHPQ : P /\\ Q\nH0 : P\nH1 : Q";
        assert_eq!(
            sentence("apply H", &st(ctx, &["R"]), &st(ctx, &["P", "Q"])),
            "By our hypothesis P -> Q -> R, we know that R is true if P and Q are true."
        );
        let ctx = "P : Prop\nHP : P";
        assert_eq!(sentence("apply HP", &st(ctx, &["P"]), &st("", &[])), "True, because of our hypothesis P.");
    }

    #[test]
    fn inversion_reports_types() {
        let ctx = "P, Q, R : Prop\nH : P -> Q -> R\nHPQ : P /\\ Q";
        let before = st(ctx, &["R"]);
        let after = st(&format!("{ctx}\nH0 : P\nH1 : Q"), &["R"]);
        assert_eq!(
            sentence("inversion HPQ", &before, &after),
            "By inversion on P /\\ Q, we know that P, Q are also true."
        );
        let before = st("H : False", &["P"]);
        assert_eq!(
            sentence("inversion H", &before, &st("", &[])),
            "By inversion on False, this case cannot occur."
        );
    }

    #[test]
    fn split_is_silent_and_unknown_warns() {
        let before = st("", &["A /\\ B"]);
        let after = st("", &["A", "B"]);
        let (a, w) = run("split", &before, &after);
        assert!(a.is_silent() && !a.unsupported && w.is_empty());
        let (a, w) = run("ring", &before, &st("", &[]));
        assert!(a.is_silent() && a.unsupported);
        assert_eq!(w[0].code, Code::UnsupportedTactic);
    }

    #[test]
    fn auto_summarizes_reported_tactics() {
        let before = st("P, Q, R : Prop\nHPQ : P -> Q\nHQR : Q -> R\nHP : P", &["R"]);
        let mut after = st("", &[]);
        after.raw = "(* info auto: *)\nsimple apply HQR.\n simple apply HPQ.\n  exact HP (in core).\nNo more subgoals.\n".into();
        assert_eq!(
            sentence("info_auto", &before, &after),
            "This follows automatically, using simple apply HQR, simple apply HPQ and exact HP."
        );
        assert_eq!(sentence("info_auto", &before, &before), "Automation leaves R unchanged.");
    }

    #[test]
    fn implication_splitting() {
        assert_eq!(split_implication("P /\\ Q -> R"), ["P /\\ Q", "R"]);
        assert_eq!(split_implication("(P -> Q) -> R"), ["(P -> Q)", "R"]);
        assert_eq!(split_implication("(A -> B)"), ["A", "B"]);
        assert_eq!(split_implication("(A -> B) /\\ (B -> A)"), ["(A -> B) /\\ (B -> A)"]);
        assert_eq!(split_implication("A <-> B"), ["A <-> B"]);
    }
}
