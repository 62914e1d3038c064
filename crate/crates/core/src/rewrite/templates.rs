//! Sentence templates kept outside the code, one `.properties` file per
//! language.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::diag::{Code, Diagnostic, Result};

/// Every placeholder any rule can supply.
pub const PLACEHOLDERS: &[&str] = &["list", "type", "goal", "hyp", "consequent", "antecedents"];

/// The reference key set with the placeholders each key's rule supplies.
pub const KEYS: &[(&str, &[&str])] = &[
    ("list.and", &[]),
    ("case.label", &["goal"]),
    ("plain.omitted", &[]),
    ("intros.variables", &["list", "type", "goal"]),
    ("intros.variable", &["list", "type", "goal"]),
    ("intros.hypotheses", &["list", "goal"]),
    ("intros.hypothesis", &["list", "goal"]),
    ("intros.mixed", &["list", "type", "hyp", "goal"]),
    ("intros.none", &["goal"]),
    ("assumption.default", &[]),
    ("apply.hypothesis.single", &["hyp", "consequent", "antecedents"]),
    ("apply.hypothesis.multiple", &["hyp", "consequent", "antecedents"]),
    ("apply.hypothesis.direct", &["hyp", "consequent"]),
    ("inversion.default", &["type", "list"]),
    ("inversion.single", &["type", "list"]),
    ("inversion.closed", &["type"]),
    ("auto.solved", &["list", "goal"]),
    ("auto.nothing", &["goal"]),
];

const BUILTIN: &[(&str, &str)] = &[
    ("en", include_str!("../../templates/en.properties")),
    ("fr", include_str!("../../templates/fr.properties")),
];

/// Languages shipped with the crate.
pub fn builtin_languages() -> impl Iterator<Item = &'static str> {
    BUILTIN.iter().map(|(l, _)| *l)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateSet {
    pub language: String,
    pub entries: BTreeMap<String, String>,
}

fn placeholders(template: &str) -> std::result::Result<Vec<&str>, String> {
    let mut out = Vec::new();
    let mut rest = template;
    while let Some(open) = rest.find(['{', '}']) {
        if rest.as_bytes()[open] == b'}' {
            return Err("unmatched `}`".into());
        }
        let after = &rest[open + 1..];
        let close = after.find('}').ok_or("unmatched `{`")?;
        out.push(&after[..close]);
        rest = &after[close + 1..];
    }
    Ok(out)
}

impl TemplateSet {
    /// Parses and validates one template file.
    pub fn parse(language: &str, text: &str) -> Result<TemplateSet> {
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let (key, value) = t.split_once('=').ok_or_else(|| {
                Diagnostic::error(
                    Code::TemplateSyntax,
                    format!("{language}.properties line {}: expected `key = value`", n + 1),
                )
            })?;
            let key = key.trim();
            let Some((_, allowed)) = KEYS.iter().find(|(k, _)| *k == key) else {
                return Err(Diagnostic::error(
                    Code::TemplateUnknownKey,
                    format!("{language}.properties line {}: unknown key `{key}`", n + 1),
                ));
            };
            let value = value.trim();
            let names = placeholders(value).map_err(|e| {
                Diagnostic::error(Code::TemplateBadPlaceholder, format!("{language}: key `{key}`: {e}"))
            })?;
            if let Some(bad) = names.iter().find(|p| !allowed.contains(p)) {
                return Err(Diagnostic::error(
                    Code::TemplateBadPlaceholder,
                    format!("{language}: key `{key}` uses placeholder `{{{bad}}}` which its rule does not supply"),
                ));
            }
            entries.insert(key.to_string(), value.to_string());
        }
        if let Some((missing, _)) = KEYS.iter().find(|(k, _)| !entries.contains_key(*k)) {
            return Err(Diagnostic::error(
                Code::TemplateMissingKey,
                format!("language `{language}` is missing template key `{missing}`"),
            ));
        }
        Ok(TemplateSet {
            language: language.to_string(),
            entries,
        })
    }

    pub fn builtin(language: &str) -> Result<TemplateSet> {
        let (_, text) = BUILTIN.iter().find(|(l, _)| *l == language).ok_or_else(|| {
            Diagnostic::error(Code::TemplateMissingKey, format!("no built-in templates for language `{language}`"))
        })?;
        TemplateSet::parse(language, text)
    }

    pub fn get(&self, key: &str) -> Result<&str> {
        self.entries.get(key).map(String::as_str).ok_or_else(|| {
            Diagnostic::error(
                Code::TemplateMissingKey,
                format!("language `{}` is missing template key `{key}`", self.language),
            )
        })
    }

    /// Fills `key` and returns its sentences. The template is split into
    /// sentences before substitution so that goal text never creates a
    /// boundary.
    pub fn fill(&self, key: &str, values: &[(&str, &str)]) -> Result<Vec<String>> {
        let template = self.get(key)?;
        Ok(split_sentences(template)
            .into_iter()
            .map(|s| {
                values
                    .iter()
                    .fold(s.to_string(), |acc, (name, v)| acc.replace(&format!("{{{name}}}"), v))
            })
            .collect())
    }

    /// Single-line fill, for labels.
    pub fn fill_line(&self, key: &str, values: &[(&str, &str)]) -> Result<String> {
        Ok(self.fill(key, values)?.join(" "))
    }

    /// `"A"`, `"A and B"`, `"A, B and C"` with the language's joiner word.
    pub fn join_list<S: AsRef<str>>(&self, items: &[S]) -> Result<String> {
        let and = self.get("list.and")?;
        Ok(match items {
            [] => String::new(),
            [one] => one.as_ref().to_string(),
            [init @ .., last] => format!(
                "{} {and} {}",
                init.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(", "),
                last.as_ref()
            ),
        })
    }
}

/// Splits after `.`, `!` or `?` when followed by whitespace and an uppercase
/// letter.
fn split_sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    for w in 0..chars.len() {
        let (i, c) = chars[w];
        if !matches!(c, '.' | '!' | '?') {
            continue;
        }
        let Some(&(_, ws)) = chars.get(w + 1) else { continue };
        let Some(&(j, next)) = chars.get(w + 2) else { continue };
        if ws.is_whitespace() && next.is_uppercase() {
            out.push(text[start..=i].trim());
            start = j;
        }
    }
    let tail = text[start..].trim();
    if !tail.is_empty() {
        out.push(tail);
    }
    out
}

/// Reads `<dir>/<language>.properties`.
pub fn load_templates(dir: &Path, language: &str) -> Result<TemplateSet> {
    let path = dir.join(format!("{language}.properties"));
    let text = fs::read_to_string(&path)
        .map_err(|e| Diagnostic::error(Code::Io, format!("cannot read templates {}: {e}", path.display())))?;
    TemplateSet::parse(language, &text)
}
