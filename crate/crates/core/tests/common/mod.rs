#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const GOLDEN: &str = "conj_imp_equiv";

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn script(name: &str) -> PathBuf {
    fixtures().join(format!("{name}.v"))
}

pub fn trace(name: &str) -> PathBuf {
    fixtures().join(format!("{name}.cqtrace"))
}

/// Every script in the fixture directory that has a recorded session.
pub fn corpus() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(fixtures())
        .unwrap()
        .filter_map(|e| {
            let p = e.unwrap().path();
            (p.extension()? == "v").then(|| p.file_stem().unwrap().to_string_lossy().into_owned())
        })
        .filter(|n| trace(n).exists())
        .collect();
    names.sort();
    names
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_coqatoo")
}

/// The `fake_coqtop` example, built alongside the tests.
pub fn fake_prover() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    let target = exe.parent().unwrap().parent().unwrap();
    let path = target
        .join("examples")
        .join(format!("fake_coqtop{}", std::env::consts::EXE_SUFFIX));
    assert!(path.exists(), "missing {}; run `cargo build --examples`", path.display());
    path
}

pub fn coqatoo(args: &[&str]) -> Output {
    coqatoo_env(args, &[])
}

pub fn coqatoo_env(args: &[&str], env: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(bin());
    cmd.args(args).env_remove("COQATOO_PROVER");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

/// Runs `name` in replay mode with extra arguments.
pub fn replay(name: &str, extra: &[&str]) -> Output {
    let s = script(name);
    let t = trace(name);
    let mut args = vec![s.to_str().unwrap(), "--provider", "replay", "--fixture", t.to_str().unwrap()];
    args.extend_from_slice(extra);
    coqatoo(&args)
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Collapses runs of spaces after the indentation and drops trailing
/// whitespace.
pub fn normalize_lines(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| {
            let body = l.trim_start();
            let indent = &l[..l.len() - body.len()];
            let words: Vec<&str> = body.split_whitespace().collect();
            format!("{indent}{}", words.join(" "))
        })
        .collect()
}

/// Removes comments and bullets from annotated output.
pub fn strip_annotations(text: &str) -> String {
    let mut out = String::new();
    let mut depth = 0;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '(' && chars.peek() == Some(&'*') {
            chars.next();
            depth += 1;
        } else if depth > 0 && c == '*' && chars.peek() == Some(&')') {
            chars.next();
            depth -= 1;
        } else if depth == 0 {
            out.push(c);
        }
    }
    out.lines()
        .map(|l| l.trim_start().trim_start_matches(['-', '+', '*']).trim())
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join("\n")
}

/// Subgoal counts read straight from the header lines of a recorded session.
pub fn recorded_counts(name: &str) -> Vec<usize> {
    let text = std::fs::read_to_string(trace(name)).unwrap();
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            let raw = v
                .get("initial_raw_state")
                .or_else(|| v.get("raw_state"))
                .and_then(|r| r.as_str())
                .unwrap();
            raw.lines()
                .find_map(|line| {
                    let mut w = line.split_whitespace();
                    let n = w.next()?.parse().ok()?;
                    matches!(w.next()?, "subgoal" | "subgoals" | "goal" | "goals").then_some(n)
                })
                .unwrap_or(0)
        })
        .collect()
}
