//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, ValueEnum};

use crate::diag::{Code, Diagnostic};
use crate::pipeline::{Pipeline, StateSource};
use crate::provider::ProverConfig;
use crate::rewrite::{load_templates, Mode, TemplateSet};

pub const PROVER_ENV: &str = "COQATOO_PROVER";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProviderKind {
    /// Run the script through a prover process.
    Live,
    /// Read states from a recorded `.cqtrace` fixture.
    Replay,
}

#[derive(Debug, Parser)]
#[command(name = "coqatoo", version, about = "Generate natural-language versions of Coq proofs")]
struct Args {
    /// Proof script (`.v`), or `-` for standard input.
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = ProviderKind::Live)]
    provider: ProviderKind,
    /// Prover executable (overrides $COQATOO_PROVER).
    #[arg(long)]
    prover: Option<PathBuf>,
    /// Recorded session to replay.
    #[arg(long)]
    fixture: Option<PathBuf>,
    /// Record the live session to this fixture path.
    #[arg(long)]
    record: Option<PathBuf>,
    #[arg(long = "lang", default_value = "en")]
    language: String,
    #[arg(long, value_enum, default_value_t = Mode::Annotated)]
    mode: Mode,
    /// Directory holding `<lang>.properties` template files.
    #[arg(long)]
    templates: Option<PathBuf>,
    /// Write the rendered proof here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Treat warnings as errors.
    #[arg(long)]
    strict: bool,
    /// Seconds to wait for each prover response.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    timeout: u64,
    /// Print the proof tree as a Graphviz graph instead of prose.
    #[arg(long)]
    dot: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub input_path: PathBuf,
    pub provider: ProviderKind,
    pub prover_path: PathBuf,
    pub fixture_path: Option<PathBuf>,
    pub record_path: Option<PathBuf>,
    pub language: String,
    pub mode: Mode,
    pub templates_dir: Option<PathBuf>,
    pub out_path: Option<PathBuf>,
    pub strict: bool,
    pub timeout_secs: u64,
    pub dot: bool,
}

/// What the command line asked for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Invocation {
    Run(RunConfig),
    /// `--help` or `--version` output.
    Info(String),
}

/// Parses arguments (without the program name), resolving the prover path
/// from `env` when no `--prover` flag is given.
pub fn parse_args_with_env<I, T>(argv: I, env: impl Fn(&str) -> Option<String>) -> Result<Invocation, Diagnostic>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let full = std::iter::once(OsString::from("coqatoo")).chain(argv.into_iter().map(Into::into));
    let args = match Args::try_parse_from(full) {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(Invocation::Info(e.to_string())),
                _ => Err(Diagnostic::error(Code::Usage, e.to_string().trim_end())),
            };
        }
    };
    if args.provider == ProviderKind::Replay && args.fixture.is_none() {
        return Err(Diagnostic::error(Code::Usage, "--provider replay requires --fixture <PATH>"));
    }
    if args.record.is_some() && args.provider != ProviderKind::Live {
        return Err(Diagnostic::error(Code::Usage, "--record requires --provider live"));
    }
    let prover_path = args
        .prover
        .or_else(|| env(PROVER_ENV).filter(|s| !s.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("coqtop"));
    Ok(Invocation::Run(RunConfig {
        input_path: args.input,
        provider: args.provider,
        prover_path,
        fixture_path: args.fixture,
        record_path: args.record,
        language: args.language,
        mode: args.mode,
        templates_dir: args.templates,
        out_path: args.out,
        strict: args.strict,
        timeout_secs: args.timeout,
        dot: args.dot,
    }))
}

/// [`parse_args_with_env`] against the process environment.
pub fn parse_args<I, T>(argv: I) -> Result<Invocation, Diagnostic>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    parse_args_with_env(argv, |k| std::env::var(k).ok())
}

/// Runs the pipeline and returns the process exit code: 0 on success, 1 on
/// errors in the input, 2 on prover or I/O failures.
pub fn run(config: &RunConfig, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let is_stdin = config.input_path.as_os_str() == "-";
    let origin = if is_stdin {
        "<stdin>".to_string()
    } else {
        config.input_path.display().to_string()
    };
    let mut source = String::new();
    let read = if is_stdin {
        stdin.read_to_string(&mut source).map(|_| ())
    } else {
        fs::read_to_string(&config.input_path).map(|s| source = s)
    };
    if let Err(e) = read {
        let _ = writeln!(stderr, "{origin}: {}", Diagnostic::error(Code::Io, format!("cannot read input: {e}")));
        return 2;
    }
    let report = |stderr: &mut dyn Write, d: &Diagnostic| {
        let _ = writeln!(stderr, "{}", d.render(&origin, &source));
    };

    let templates = match &config.templates_dir {
        Some(dir) => load_templates(dir, &config.language),
        None => TemplateSet::builtin(&config.language),
    };
    let templates = match templates {
        Ok(t) => t,
        Err(d) => {
            report(stderr, &d);
            return if d.code.is_environmental() { 2 } else { 1 };
        }
    };

    let states = match config.provider {
        ProviderKind::Live => StateSource::Live(
            ProverConfig::coqtop(&config.prover_path).with_timeout(Duration::from_secs(config.timeout_secs)),
        ),
        ProviderKind::Replay => StateSource::Replay(config.fixture_path.clone().expect("validated by parse_args")),
    };
    let pipeline = Pipeline::new(&templates, config.mode)
        .record_to(config.record_path.clone())
        .strict(config.strict)
        .dot(config.dot);

    match pipeline.run(&source, &states) {
        Ok(out) => {
            for w in &out.warnings {
                report(stderr, w);
            }
            let written = match &config.out_path {
                Some(path) => fs::write(path, &out.text),
                None => stdout.write_all(out.text.as_bytes()).and_then(|_| stdout.flush()),
            };
            if let Err(e) = written {
                report(stderr, &Diagnostic::error(Code::Io, format!("cannot write output: {e}")));
                return 2;
            }
            0
        }
        Err(failure) => {
            for d in &failure.diagnostics {
                report(stderr, d);
            }
            if failure.is_environmental() {
                2
            } else {
                1
            }
        }
    }
}

/// Entry point shared by the binary: parse, run, map to an exit code.
pub fn main_with<I, T>(argv: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_args(argv) {
        Ok(Invocation::Run(cfg)) => run(&cfg, stdin, stdout, stderr),
        Ok(Invocation::Info(text)) => {
            let _ = write!(stdout, "{text}");
            0
        }
        Err(d) => {
            let _ = writeln!(stderr, "{}", d.message);
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, Diagnostic> {
        match parse_args_with_env(args, |_| None)? {
            Invocation::Run(c) => Ok(c),
            Invocation::Info(_) => panic!("unexpected info"),
        }
    }

    #[test]
    fn defaults() {
        let c = parse(&["proof.v"]).unwrap();
        assert_eq!(c.input_path, PathBuf::from("proof.v"));
        assert_eq!(c.provider, ProviderKind::Live);
        assert_eq!(c.prover_path, PathBuf::from("coqtop"));
        assert_eq!(c.language, "en");
        assert_eq!(c.mode, Mode::Annotated);
        assert_eq!(c.timeout_secs, 10);
        assert!(!c.strict && !c.dot);
        assert_eq!(c.fixture_path, None);
    }

    #[test]
    fn replay_in_french() {
        let c = parse(&["proof.v", "--provider", "replay", "--fixture", "t.cqtrace", "--lang", "fr"]).unwrap();
        assert_eq!(c.provider, ProviderKind::Replay);
        assert_eq!(c.fixture_path, Some(PathBuf::from("t.cqtrace")));
        assert_eq!(c.language, "fr");
    }

    #[test]
    fn invalid_combinations() {
        assert_eq!(parse(&["proof.v", "--provider", "replay"]).unwrap_err().code, Code::Usage);
        assert_eq!(
            parse(&["p.v", "--provider", "replay", "--fixture", "f", "--record", "r"]).unwrap_err().code,
            Code::Usage
        );
        assert_eq!(parse(&["p.v", "--bogus"]).unwrap_err().code, Code::Usage);
        assert_eq!(parse(&[]).unwrap_err().code, Code::Usage);
        assert_eq!(parse(&["p.v", "--timeout", "0"]).unwrap_err().code, Code::Usage);
        assert_eq!(parse(&["p.v", "--mode", "html"]).unwrap_err().code, Code::Usage);
    }

    #[test]
    fn prover_resolution_order() {
        let env = |k: &str| (k == PROVER_ENV).then(|| "/opt/coq/bin/coqtop".to_string());
        let Invocation::Run(c) = parse_args_with_env(["p.v"], env).unwrap() else { panic!() };
        assert_eq!(c.prover_path, PathBuf::from("/opt/coq/bin/coqtop"));
        let Invocation::Run(c) = parse_args_with_env(["p.v", "--prover", "my-coqtop"], env).unwrap() else {
            panic!()
        };
        assert_eq!(c.prover_path, PathBuf::from("my-coqtop"));
    }

    #[test]
    fn help_is_info() {
        assert!(matches!(parse_args_with_env(["--help"], |_| None), Ok(Invocation::Info(_))));
    }
}
