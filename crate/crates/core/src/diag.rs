//! Diagnostics shared by every pipeline stage.

use std::fmt;

/// Byte range `[start, end)` into the source script.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    /// 1-based (line, column) of `start` within `source`.
    pub fn line_col(&self, source: &str) -> (usize, usize) {
        let upto = &source[..self.start.min(source.len())];
        let line = upto.matches('\n').count() + 1;
        let col = upto.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Severity {
    Error,
    Warning,
}

/// Stable short identifiers for every diagnostic the pipeline can emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Code {
    UnterminatedComment,
    UnterminatedString,
    MissingTerminator,
    AmbiguousTerminator,
    NoLemma,
    MultipleLemmas,
    UnsupportedChain,
    UnsupportedTactic,
    MalformedState,
    MalformedHyp,
    ProverMissing,
    ProverTimeout,
    ProverExited,
    TacticFailed,
    FixtureMismatch,
    FixtureParse,
    Io,
    HeuristicClassification,
    IncompleteProof,
    MalformedTrace,
    TemplateMissingKey,
    TemplateBadPlaceholder,
    TemplateUnknownKey,
    TemplateSyntax,
    Usage,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::UnterminatedComment => "UNTERMINATED_COMMENT",
            Code::UnterminatedString => "UNTERMINATED_STRING",
            Code::MissingTerminator => "MISSING_TERMINATOR",
            Code::AmbiguousTerminator => "AMBIGUOUS_TERMINATOR",
            Code::NoLemma => "NO_LEMMA",
            Code::MultipleLemmas => "MULTIPLE_LEMMAS",
            Code::UnsupportedChain => "UNSUPPORTED_CHAIN",
            Code::UnsupportedTactic => "UNSUPPORTED_TACTIC",
            Code::MalformedState => "MALFORMED_STATE",
            Code::MalformedHyp => "MALFORMED_HYP",
            Code::ProverMissing => "PROVER_MISSING",
            Code::ProverTimeout => "PROVER_TIMEOUT",
            Code::ProverExited => "PROVER_EXITED",
            Code::TacticFailed => "TACTIC_FAILED",
            Code::FixtureMismatch => "FIXTURE_MISMATCH",
            Code::FixtureParse => "FIXTURE_PARSE",
            Code::Io => "IO",
            Code::HeuristicClassification => "HEURISTIC_CLASSIFICATION",
            Code::IncompleteProof => "INCOMPLETE_PROOF",
            Code::MalformedTrace => "MALFORMED_TRACE",
            Code::TemplateMissingKey => "TEMPLATE_MISSING_KEY",
            Code::TemplateBadPlaceholder => "TEMPLATE_BAD_PLACEHOLDER",
            Code::TemplateUnknownKey => "TEMPLATE_UNKNOWN_KEY",
            Code::TemplateSyntax => "TEMPLATE_SYNTAX",
            Code::Usage => "USAGE",
        }
    }

    /// Failures of the environment (prover process, file system) rather than
    /// of the input. The CLI maps these to exit code 2.
    pub fn is_environmental(self) -> bool {
        matches!(
            self,
            Code::ProverMissing | Code::ProverTimeout | Code::ProverExited | Code::Io
        )
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{}[{code}]: {message}", match .severity { Severity::Error => "error", Severity::Warning => "warning" })]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub message: String,
    pub span: Option<Span>,
}

impl Diagnostic {
    pub fn error(code: Code, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            span: None,
        }
    }

    pub fn warning(code: Code, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            code,
            message: message.into(),
            span: None,
        }
    }

    pub fn with_span(mut self, span: Span) -> Self {
        self.span = Some(span);
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// Promotes a warning to an error (used by `--strict`).
    pub fn promoted(mut self) -> Self {
        self.severity = Severity::Error;
        self
    }

    /// Renders `origin:line:col: severity[CODE]: message`, dropping the
    /// location when the diagnostic carries no span.
    pub fn render(&self, origin: &str, source: &str) -> String {
        match self.span {
            Some(span) => {
                let (line, col) = span.line_col(source);
                format!("{origin}:{line}:{col}: {self}")
            }
            None => format!("{origin}: {self}"),
        }
    }
}

pub type Result<T, E = Diagnostic> = std::result::Result<T, E>;
