//! Sentence-level tokenizer for Coq proof scripts.
//!
//! A script is split into [`ScriptItem`]s: vernacular sentences terminated by
//! a `.` that is followed by whitespace or end of input, top-level comments,
//! and bullets. Whitespace between items is recorded so the source can be
//! rebuilt byte for byte.

use crate::diag::{Code, Diagnostic, Result, Span};

/// Tactic heads the rewriter has rules for.
pub const SUPPORTED_TACTICS: &[&str] = &[
    "intros",
    "split",
    "apply",
    "assumption",
    "inversion",
    "auto",
    "info_auto",
];

const LEMMA_KEYWORDS: &[&str] = &[
    "Lemma",
    "Theorem",
    "Example",
    "Fact",
    "Remark",
    "Corollary",
    "Proposition",
    "Goal",
];

const PROOF_END_KEYWORDS: &[&str] = &["Qed", "Defined", "Admitted", "Save", "Abort"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ItemKind {
    LemmaHeader,
    ProofBegin,
    Tactic,
    /// `-`, `+`, `*` runs and `{` / `}`. Structure hints only.
    Bullet,
    Comment,
    ProofEnd,
    /// Any other vernacular sentence (`Require Import ...`).
    Command,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptItem {
    pub kind: ItemKind,
    /// Current text, terminator included. May differ from the source after
    /// preprocessing.
    pub text: String,
    /// Source text when `text` has been rewritten.
    pub original: Option<String>,
    pub span: Span,
    pub seq: usize,
}

impl ScriptItem {
    /// The text exactly as it appeared in the source.
    pub fn source_text(&self) -> &str {
        self.original.as_deref().unwrap_or(&self.text)
    }

    /// Sentence text without its terminating `.`, trimmed.
    pub fn body(&self) -> &str {
        sentence_body(&self.text)
    }

    /// Like [`body`](Self::body) but on the source text.
    pub fn source_body(&self) -> &str {
        sentence_body(self.source_text())
    }

    /// First identifier of the sentence, skipping leading comments.
    pub fn head(&self) -> Option<&str> {
        head_range(&self.text).map(|r| &self.text[r])
    }

    pub fn is_tactic(&self) -> bool {
        self.kind == ItemKind::Tactic
    }
}

fn sentence_body(text: &str) -> &str {
    let t = text.trim();
    t.strip_suffix('.').unwrap_or(t).trim()
}

/// A tokenized script plus the whitespace around its items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Script {
    pub items: Vec<ScriptItem>,
    /// `gaps[i]` is the whitespace preceding `items[i]`; the final entry is
    /// the trailing whitespace.
    pub gaps: Vec<String>,
    /// Non-fatal findings of the tokenizer.
    pub warnings: Vec<Diagnostic>,
}

impl Script {
    /// Rebuilds the source from item source texts and recorded whitespace.
    pub fn reconstruct(&self) -> String {
        let mut out = String::new();
        for (gap, item) in self.gaps.iter().zip(&self.items) {
            out.push_str(gap);
            out.push_str(item.source_text());
        }
        if let Some(tail) = self.gaps.last() {
            out.push_str(tail);
        }
        out
    }

    pub fn tactics(&self) -> impl Iterator<Item = &ScriptItem> {
        self.items.iter().filter(|i| i.is_tactic())
    }

    /// Splits out the first lemma and its proof. Later lemmas are counted
    /// but otherwise ignored.
    pub fn first_lemma(&self) -> Result<LemmaBlock> {
        split_first_lemma(&self.items)
    }
}

/// See [`Script::first_lemma`].
pub fn split_first_lemma(items: &[ScriptItem]) -> Result<LemmaBlock> {
    let header_idx = items
        .iter()
        .position(|i| i.kind == ItemKind::LemmaHeader)
        .ok_or_else(|| Diagnostic::error(Code::NoLemma, "no lemma statement found"))?;
    let preamble = items[..header_idx]
        .iter()
        .filter(|i| i.kind == ItemKind::Command)
        .cloned()
        .collect();
    let mut block = LemmaBlock {
        preamble,
        header: items[header_idx].clone(),
        proof_begin: None,
        body: Vec::new(),
        proof_end: None,
        later_lemmas: 0,
    };
    let mut rest = items[header_idx + 1..].iter();
    for item in rest.by_ref() {
        match item.kind {
            ItemKind::ProofBegin if block.proof_begin.is_none() && block.body.is_empty() => {
                block.proof_begin = Some(item.clone())
            }
            ItemKind::ProofEnd => {
                block.proof_end = Some(item.clone());
                break;
            }
            _ => block.body.push(item.clone()),
        }
    }
    block.later_lemmas = rest.filter(|i| i.kind == ItemKind::LemmaHeader).count();
    Ok(block)
}

/// One lemma with its proof, as selected by [`Script::first_lemma`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaBlock {
    /// Commands preceding the lemma, sent to a live prover first.
    pub preamble: Vec<ScriptItem>,
    pub header: ScriptItem,
    pub proof_begin: Option<ScriptItem>,
    /// Tactics, comments and bullets between `Proof.` and the proof end.
    pub body: Vec<ScriptItem>,
    pub proof_end: Option<ScriptItem>,
    pub later_lemmas: usize,
}

impl LemmaBlock {
    pub fn tactics(&self) -> Vec<ScriptItem> {
        self.body.iter().filter(|i| i.is_tactic()).cloned().collect()
    }
}

/// Splits `source` into document-ordered items.
pub fn tokenize_script(source: &str) -> Result<Script> {
    let mut lexer = Lexer {
        src: source,
        bytes: source.as_bytes(),
        pos: 0,
        warnings: Vec::new(),
    };
    let mut items = Vec::new();
    let mut gaps = Vec::new();
    let mut in_proof = false;

    loop {
        let gap_start = lexer.pos;
        lexer.skip_whitespace();
        gaps.push(source[gap_start..lexer.pos].to_string());
        if lexer.at_end() {
            break;
        }
        let start = lexer.pos;
        let kind = if lexer.starts_with("(*") {
            lexer.skip_comment()?;
            ItemKind::Comment
        } else if lexer.at_bullet() {
            lexer.skip_bullet();
            ItemKind::Bullet
        } else {
            lexer.scan_sentence()?;
            let text = &source[start..lexer.pos];
            let kind = classify_sentence(text, in_proof);
            match kind {
                ItemKind::LemmaHeader => in_proof = true,
                ItemKind::ProofEnd => in_proof = false,
                _ => {}
            }
            kind
        };
        items.push(ScriptItem {
            kind,
            text: source[start..lexer.pos].to_string(),
            original: None,
            span: Span::new(start, lexer.pos),
            seq: items.len(),
        });
    }

    if !items.iter().any(|i| i.kind == ItemKind::LemmaHeader) {
        return Err(Diagnostic::error(Code::NoLemma, "no lemma statement found"));
    }
    Ok(Script {
        items,
        gaps,
        warnings: lexer.warnings,
    })
}

fn classify_sentence(text: &str, in_proof: bool) -> ItemKind {
    let Some(head) = head_range(text).map(|r| &text[r]) else {
        return if in_proof { ItemKind::Tactic } else { ItemKind::Command };
    };
    if LEMMA_KEYWORDS.contains(&head) {
        ItemKind::LemmaHeader
    } else if PROOF_END_KEYWORDS.contains(&head) {
        ItemKind::ProofEnd
    } else if head == "Proof" {
        ItemKind::ProofBegin
    } else if in_proof {
        ItemKind::Tactic
    } else {
        ItemKind::Command
    }
}

fn is_ident_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_' || b == b'\''
}

/// Byte range of the first identifier in `text`, skipping whitespace and
/// comments.
fn head_range(text: &str) -> Option<std::ops::Range<usize>> {
    let bytes = text.as_bytes();
    let mut i = 0;
    loop {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if bytes[i..].starts_with(b"(*") {
            i = comment_end(bytes, i)?;
            continue;
        }
        break;
    }
    let start = i;
    while i < bytes.len() && is_ident_byte(bytes[i]) {
        i += 1;
    }
    (i > start).then_some(start..i)
}

/// End offset (exclusive) of the nested comment starting at `start`.
fn comment_end(bytes: &[u8], start: usize) -> Option<usize> {
    let mut depth = 0usize;
    let mut i = start;
    while i < bytes.len() {
        if bytes[i..].starts_with(b"(*") {
            depth += 1;
            i += 2;
        } else if bytes[i..].starts_with(b"*)") {
            depth -= 1;
            i += 2;
            if depth == 0 {
                return Some(i);
            }
        } else {
            i += 1;
        }
    }
    None
}

/// End offset (exclusive) of the string literal starting at `start`.
/// `""` inside a literal is an escaped quote.
fn string_end(bytes: &[u8], start: usize) -> Option<usize> {
    let mut i = start + 1;
    while i < bytes.len() {
        if bytes[i] == b'"' {
            if bytes.get(i + 1) == Some(&b'"') {
                i += 2;
                continue;
            }
            return Some(i + 1);
        }
        i += 1;
    }
    None
}

/// Offsets of `needle` in `text` outside comments, strings and parentheses.
pub(crate) fn top_level_positions(text: &str, needle: u8) -> Vec<usize> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' if bytes[i..].starts_with(b"(*") => {
                i = comment_end(bytes, i).unwrap_or(bytes.len());
                continue;
            }
            b'"' => {
                i = string_end(bytes, i).unwrap_or(bytes.len());
                continue;
            }
            b'(' => depth += 1,
            b')' => depth = depth.saturating_sub(1),
            b if b == needle && depth == 0 => out.push(i),
            _ => {}
        }
        i += 1;
    }
    out
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    warnings: Vec<Diagnostic>,
}

impl Lexer<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.bytes.len()
    }

    fn starts_with(&self, s: &str) -> bool {
        self.bytes[self.pos..].starts_with(s.as_bytes())
    }

    fn skip_whitespace(&mut self) {
        // Non-ASCII whitespace is left to the sentence scanner.
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn skip_comment(&mut self) -> Result<()> {
        match comment_end(self.bytes, self.pos) {
            Some(end) => {
                self.pos = end;
                Ok(())
            }
            None => Err(Diagnostic::error(Code::UnterminatedComment, "comment is never closed")
                .with_span(Span::new(self.pos, self.bytes.len()))),
        }
    }

    fn at_bullet(&self) -> bool {
        matches!(self.bytes[self.pos], b'-' | b'+' | b'*' | b'{' | b'}')
    }

    fn skip_bullet(&mut self) {
        let glyph = self.bytes[self.pos];
        self.pos += 1;
        if glyph == b'{' || glyph == b'}' {
            return;
        }
        while self.pos < self.bytes.len() && self.bytes[self.pos] == glyph {
            self.pos += 1;
        }
    }

    /// Advances past the next sentence terminator: a `.` at parenthesis depth
    /// zero followed by whitespace or end of input.
    fn scan_sentence(&mut self) -> Result<()> {
        let start = self.pos;
        let mut depth = 0usize;
        let mut i = self.pos;
        while i < self.bytes.len() {
            match self.bytes[i] {
                b'(' if self.bytes[i..].starts_with(b"(*") => {
                    i = comment_end(self.bytes, i).ok_or_else(|| {
                        Diagnostic::error(Code::UnterminatedComment, "comment is never closed")
                            .with_span(Span::new(i, self.bytes.len()))
                    })?;
                    continue;
                }
                b'"' => {
                    let end = string_end(self.bytes, i).ok_or_else(|| {
                        Diagnostic::error(Code::UnterminatedString, "string literal is never closed")
                            .with_span(Span::new(i, self.bytes.len()))
                    })?;
                    if has_terminator_like(&self.src[i + 1..end - 1]) {
                        self.warn_ambiguous(i, end, "string literal contains a sentence-like `. `");
                    }
                    i = end;
                    continue;
                }
                b'(' => depth += 1,
                b')' => depth = depth.saturating_sub(1),
                b'.' if self.terminates_at(i) => {
                    if depth == 0 {
                        self.pos = i + 1;
                        return Ok(());
                    }
                    self.warn_ambiguous(i, i + 1, "`.` inside parentheses is not treated as a terminator");
                }
                _ => {}
            }
            i += 1;
        }
        Err(Diagnostic::error(Code::MissingTerminator, "sentence is not terminated by `.`")
            .with_span(Span::new(start, self.bytes.len())))
    }

    fn terminates_at(&self, i: usize) -> bool {
        match self.src[i + 1..].chars().next() {
            None => true,
            Some(c) => c.is_whitespace(),
        }
    }

    fn warn_ambiguous(&mut self, start: usize, end: usize, msg: &str) {
        self.warnings.push(
            Diagnostic::warning(Code::AmbiguousTerminator, msg).with_span(Span::new(start, end)),
        );
    }
}

fn has_terminator_like(s: &str) -> bool {
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '.' && chars.peek().is_none_or(|n| n.is_whitespace()) {
            return true;
        }
    }
    false
}

/// Rewrites every `auto` tactic head to `info_auto`, keeping the source text
/// in [`ScriptItem::original`]. Idempotent.
pub fn preprocess_auto(items: &[ScriptItem]) -> Vec<ScriptItem> {
    items
        .iter()
        .map(|item| {
            let mut item = item.clone();
            if item.is_tactic() {
                if let Some(range) = head_range(&item.text).filter(|r| &item.text[r.clone()] == "auto") {
                    let original = item.text.clone();
                    item.text.replace_range(range, "info_auto");
                    item.original.get_or_insert(original);
                }
            }
            item
        })
        .collect()
}

/// Flags chained tactics (errors) and tactics without rewriting rules
/// (warnings).
pub fn detect_unsupported(items: &[ScriptItem]) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for item in items.iter().filter(|i| i.is_tactic()) {
        if let Some(&at) = top_level_positions(item.source_text(), b';').first() {
            let start = item.span.start + at;
            out.push(
                Diagnostic::error(
                    Code::UnsupportedChain,
                    format!("tactic chaining with `;` is not supported: `{}`", item.source_body()),
                )
                .with_span(Span::new(start, start + 1)),
            );
            continue;
        }
        match item.head() {
            Some(h) if SUPPORTED_TACTICS.contains(&h) => {}
            head => out.push(
                Diagnostic::warning(
                    Code::UnsupportedTactic,
                    format!("no rewriting rule for tactic `{}`", head.unwrap_or(item.body())),
                )
                .with_span(item.span),
            ),
        }
    }
    out
}
