//! End-to-end pipeline: tokenize, capture states, build the tree, rewrite,
//! render.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::diag::{Code, Diagnostic};
use crate::provider::{record_session, run_live, run_replay, ProverConfig, SessionTrace};
use crate::rewrite::{Mode, Renderer, Rewriter, TemplateSet};
use crate::script::{detect_unsupported, preprocess_auto, split_first_lemma, tokenize_script, ItemKind};
use crate::tree::{build_tree, to_dot, ProofNode};

#[derive(Debug, Clone)]
pub enum StateSource {
    Live(ProverConfig),
    Replay(PathBuf),
}

#[derive(Debug, Clone)]
pub struct Output {
    pub text: String,
    pub warnings: Vec<Diagnostic>,
    pub trace: SessionTrace,
    pub tree: ProofNode,
}

/// Every diagnostic raised before the run was abandoned; at least one is an
/// error.
#[derive(Debug, Clone, thiserror::Error)]
#[error("{} error(s)", .diagnostics.iter().filter(|d| d.is_error()).count())]
pub struct Failure {
    pub diagnostics: Vec<Diagnostic>,
}

impl Failure {
    /// True when some error came from the environment rather than the input.
    pub fn is_environmental(&self) -> bool {
        self.diagnostics
            .iter()
            .any(|d| d.is_error() && d.code.is_environmental())
    }
}

pub struct Pipeline<'t> {
    templates: &'t TemplateSet,
    mode: Mode,
    record: Option<PathBuf>,
    strict: bool,
    dot: bool,
}

impl<'t> Pipeline<'t> {
    pub fn new(templates: &'t TemplateSet, mode: Mode) -> Self {
        Pipeline {
            templates,
            mode,
            record: None,
            strict: false,
            dot: false,
        }
    }

    /// Write the captured session to this fixture path.
    pub fn record_to(mut self, path: Option<PathBuf>) -> Self {
        self.record = path;
        self
    }

    pub fn strict(mut self, strict: bool) -> Self {
        self.strict = strict;
        self
    }

    /// Emit the proof tree as Graphviz instead of prose.
    pub fn dot(mut self, dot: bool) -> Self {
        self.dot = dot;
        self
    }

    pub fn run(&self, source: &str, states: &StateSource) -> Result<Output, Failure> {
        let mut diags: Vec<Diagnostic> = Vec::new();
        macro_rules! bail {
            ($d:expr) => {{
                diags.push($d);
                return Err(Failure { diagnostics: diags });
            }};
        }

        let script = match tokenize_script(source) {
            Ok(s) => s,
            Err(d) => bail!(d),
        };
        diags.extend(script.warnings.iter().cloned());
        let items = preprocess_auto(&script.items);
        let block = match split_first_lemma(&items) {
            Ok(b) => b,
            Err(d) => bail!(d),
        };
        if block.later_lemmas > 0 {
            let mut d = Diagnostic::warning(
                Code::MultipleLemmas,
                format!("{} more lemma(s) after the first are ignored", block.later_lemmas),
            );
            if let Some(second) = items
                .iter()
                .filter(|i| i.kind == ItemKind::LemmaHeader)
                .nth(1)
            {
                d = d.with_span(second.span);
            }
            diags.push(d);
        }
        diags.extend(detect_unsupported(&block.body));
        self.check(&mut diags)?;

        let trace = match states {
            StateSource::Live(cfg) => run_live(&items, cfg),
            StateSource::Replay(path) => run_replay(&items, path),
        };
        let trace = match trace {
            Ok(t) => t,
            Err(d) => bail!(d),
        };
        if let Some(path) = &self.record {
            if let Err(d) = record_session(&trace, path) {
                bail!(d);
            }
        }
        let tree = match build_tree(&trace) {
            Ok(t) => t,
            Err(d) => bail!(d),
        };

        let text = if self.dot {
            to_dot(&tree)
        } else {
            let mut rewriter = Rewriter::new(self.templates);
            let annotations = match rewriter.annotate_trace(&trace) {
                Ok(a) => a,
                Err(d) => bail!(d),
            };
            for w in rewriter.into_warnings() {
                if !diags.iter().any(|d| d.code == w.code && d.span == w.span) {
                    diags.push(w);
                }
            }
            self.check(&mut diags)?;

            let mut comments: BTreeMap<usize, Vec<String>> = BTreeMap::new();
            let mut pending = Vec::new();
            for item in &block.body {
                match item.kind {
                    ItemKind::Comment => pending.push(item.text.clone()),
                    ItemKind::Tactic if !pending.is_empty() => {
                        comments.insert(item.seq, std::mem::take(&mut pending));
                    }
                    _ => {}
                }
            }
            let renderer = Renderer::new(self.templates, self.mode)
                .with_markers(
                    block.proof_begin.as_ref().map(|i| i.source_text()),
                    block.proof_end.as_ref().map(|i| i.source_text()),
                )
                .with_comments(comments);
            match renderer.render(&tree, &annotations, block.header.source_text()) {
                Ok(t) => t,
                Err(d) => bail!(d),
            }
        };

        Ok(Output {
            text,
            warnings: diags,
            trace,
            tree,
        })
    }

    /// Fails when `diags` holds an error, promoting warnings first under
    /// `strict`.
    fn check(&self, diags: &mut Vec<Diagnostic>) -> Result<(), Failure> {
        if self.strict {
            for d in diags.iter_mut() {
                *d = d.clone().promoted();
            }
        }
        if diags.iter().any(Diagnostic::is_error) {
            return Err(Failure {
                diagnostics: std::mem::take(diags),
            });
        }
        Ok(())
    }
}
