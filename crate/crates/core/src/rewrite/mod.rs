//! Natural-language rewriting: templates, per-tactic rules and renderers.

mod render;
mod rules;
mod templates;

pub use render::{latex_escape, render, Mode, Renderer};
pub use rules::{rewrite_step, split_implication, Annotation, AnnotationKind, Rewriter};
pub use templates::{builtin_languages, load_templates, TemplateSet, KEYS, PLACEHOLDERS};
