//! Natural-language versions of Coq proof scripts.
//!
//! The pipeline runs each tactic of a script through the prover (or a
//! recorded session), diffs consecutive proof states, rebuilds the proof
//! tree from the linear trace, and rewrites every tactic into one or two
//! sentences from per-language templates.
//!
//! ```no_run
//! use coqatoo::pipeline::{Pipeline, StateSource};
//! use coqatoo::rewrite::{Mode, TemplateSet};
//!
//! let source = std::fs::read_to_string("conj_imp_equiv.v").unwrap();
//! let templates = TemplateSet::builtin("en").unwrap();
//! let out = Pipeline::new(&templates, Mode::Annotated)
//!     .run(&source, &StateSource::Replay("conj_imp_equiv.cqtrace".into()))
//!     .unwrap();
//! print!("{}", out.text);
//! ```

pub mod cli;
pub mod diag;
pub mod diff;
pub mod goal;
pub mod pipeline;
pub mod provider;
pub mod rewrite;
pub mod script;
pub mod tree;

pub use diag::{Code, Diagnostic, Severity, Span};
pub use diff::{classify_bindings, diff_states, Classification, StateDiff};
pub use goal::{equal_states, parse_state, Hypothesis, ProofState};
pub use provider::{record_session, run_live, run_replay, SessionTrace};
pub use script::{detect_unsupported, preprocess_auto, tokenize_script, ItemKind, ScriptItem};
pub use tree::{build_tree, case_labels, ProofNode};
