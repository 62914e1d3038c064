//! Output renderers: annotated script, plain prose and LaTeX.

use std::collections::BTreeMap;

use super::rules::Annotation;
use super::templates::TemplateSet;
use crate::diag::Result;
use crate::goal::normalize_ws;
use crate::tree::ProofNode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    /// The original script with an explanatory comment before each tactic.
    Annotated,
    /// Sentences only.
    Plain,
    /// Sentences inside a LaTeX `proof` environment.
    Latex,
}

/// Escapes LaTeX special characters.
pub fn latex_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\textbackslash{}"),
            '{' | '}' | '_' | '%' | '&' | '#' | '$' => {
                out.push('\\');
                out.push(c);
            }
            '~' => out.push_str("\\textasciitilde{}"),
            '^' => out.push_str("\\textasciicircum{}"),
            _ => out.push(c),
        }
    }
    out
}

/// Renders a proof tree and its annotations.
pub struct Renderer<'a> {
    templates: &'a TemplateSet,
    mode: Mode,
    proof_begin: String,
    proof_end: String,
    comments: BTreeMap<usize, Vec<String>>,
}

impl<'a> Renderer<'a> {
    pub fn new(templates: &'a TemplateSet, mode: Mode) -> Self {
        Renderer {
            templates,
            mode,
            proof_begin: "Proof.".into(),
            proof_end: "Qed.".into(),
            comments: BTreeMap::new(),
        }
    }

    /// Source text of the `Proof.` and `Qed.` sentences.
    pub fn with_markers(mut self, begin: Option<&str>, end: Option<&str>) -> Self {
        if let Some(b) = begin {
            self.proof_begin = normalize_ws(b);
        }
        if let Some(e) = end {
            self.proof_end = normalize_ws(e);
        }
        self
    }

    /// User comments to reproduce in annotated mode, keyed by the `seq` of
    /// the tactic they precede.
    pub fn with_comments(mut self, comments: BTreeMap<usize, Vec<String>>) -> Self {
        self.comments = comments;
        self
    }

    pub fn render(&self, tree: &ProofNode, annotations: &BTreeMap<usize, Annotation>, lemma: &str) -> Result<String> {
        let mut lines = Vec::new();
        let lemma = normalize_ws(lemma);
        match self.mode {
            Mode::Annotated => {
                lines.push(lemma);
                lines.push(self.proof_begin.clone());
                self.annotated(tree, annotations, &mut lines)?;
                lines.push(self.proof_end.clone());
            }
            Mode::Plain => {
                lines.push(lemma);
                self.plain(tree, annotations, &mut lines)?;
            }
            Mode::Latex => {
                lines.push(format!("\\noindent\\textbf{{Lemma.}} \\texttt{{{}}}", latex_escape(&lemma)));
                lines.push("\\begin{proof}".into());
                self.latex(tree, annotations, &mut lines)?;
                lines.push("\\end{proof}".into());
            }
        }
        let mut out = lines.join("\n");
        out.push('\n');
        Ok(out)
    }

    fn case_label(&self, node: &ProofNode) -> Result<String> {
        let goal = normalize_ws(node.case_goal.as_deref().unwrap_or_default());
        self.templates.fill_line("case.label", &[("goal", &goal)])
    }

    fn annotated(&self, node: &ProofNode, ann: &BTreeMap<usize, Annotation>, lines: &mut Vec<String>) -> Result<()> {
        // Bullet at 2*d columns, its content aligned after the glyph.
        let indent = if node.depth == 0 { 0 } else { 3 * node.depth + 1 };
        let pad = " ".repeat(indent);
        for step in &node.steps {
            let seq = step.item.seq;
            for c in self.comments.get(&seq).into_iter().flatten() {
                lines.push(format!("{pad}{}", normalize_ws(c)));
            }
            let tactic = normalize_ws(step.item.source_text());
            match ann.get(&seq).filter(|a| !a.is_silent()) {
                Some(a) => lines.push(format!("{pad}(* {} *) {tactic}", a.sentences.join(" "))),
                None => lines.push(format!("{pad}{tactic}")),
            }
        }
        for child in &node.children {
            let d = child.depth;
            lines.push(format!(
                "{}{} (* {} *)",
                " ".repeat(2 * d),
                "-".repeat(d),
                self.case_label(child)?
            ));
            self.annotated(child, ann, lines)?;
        }
        Ok(())
    }

    fn step_text(&self, a: Option<&Annotation>) -> Result<Option<String>> {
        Ok(match a {
            Some(a) if !a.is_silent() => Some(a.sentences.join(" ")),
            Some(a) if a.unsupported => Some(self.templates.get("plain.omitted")?.to_string()),
            _ => None,
        })
    }

    fn plain(&self, node: &ProofNode, ann: &BTreeMap<usize, Annotation>, lines: &mut Vec<String>) -> Result<()> {
        let pad = "  ".repeat(node.depth);
        for step in &node.steps {
            if let Some(text) = self.step_text(ann.get(&step.item.seq))? {
                lines.push(format!("{pad}{text}"));
            }
        }
        for child in &node.children {
            lines.push(format!("{pad}{}", self.case_label(child)?));
            self.plain(child, ann, lines)?;
        }
        Ok(())
    }

    fn latex(&self, node: &ProofNode, ann: &BTreeMap<usize, Annotation>, lines: &mut Vec<String>) -> Result<()> {
        for step in &node.steps {
            if let Some(text) = self.step_text(ann.get(&step.item.seq))? {
                lines.push(latex_escape(&text));
            }
        }
        if !node.children.is_empty() {
            lines.push("\\begin{itemize}".into());
            for child in &node.children {
                lines.push(format!("\\item \\textbf{{{}}}", latex_escape(&self.case_label(child)?)));
                self.latex(child, ann, lines)?;
            }
            lines.push("\\end{itemize}".into());
        }
        Ok(())
    }
}

/// Renders with default `Proof.` / `Qed.` markers and no user comments.
pub fn render(
    tree: &ProofNode,
    annotations: &BTreeMap<usize, Annotation>,
    mode: Mode,
    lemma: &str,
    templates: &TemplateSet,
) -> Result<String> {
    Renderer::new(templates, mode).render(tree, annotations, lemma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_every_special_character() {
        assert_eq!(
            latex_escape(r"P /\ Q {x_1} 50% & # $ ~ ^"),
            r"P /\textbackslash{} Q \{x\_1\} 50\% \& \# \$ \textasciitilde{} \textasciicircum{}"
        );
    }

    #[test]
    fn empty_proof_renders_markers_only() {
        let t = TemplateSet::builtin("en").unwrap();
        let root = ProofNode {
            steps: Vec::new(),
            case_goal: None,
            children: Vec::new(),
            depth: 0,
        };
        let out = render(&root, &BTreeMap::new(), Mode::Annotated, "Lemma t :\n  True.", &t).unwrap();
        assert_eq!(out, "Lemma t : True.\nProof.\nQed.\n");
        let out = render(&root, &BTreeMap::new(), Mode::Latex, "Lemma t_1 : True.", &t).unwrap();
        assert_eq!(
            out,
            "\\noindent\\textbf{Lemma.} \\texttt{Lemma t\\_1 : True.}\n\\begin{proof}\n\\end{proof}\n"
        );
    }
}
