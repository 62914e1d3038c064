//! Driver for an interactive `coqtop` process.
//!
//! The prover runs with `-emacs`, which wraps every ready prompt in
//! `<prompt>...</prompt>`. Its stdout and stderr share one pipe so that the
//! prompt (written to stderr) is always observed after the response that
//! precedes it. One sentence is in flight at a time.

use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use super::{SessionTrace, TraceStep};
use crate::diag::{Code, Diagnostic, Result, Span};
use crate::goal::{normalize_ws, parse_state};
use crate::script::{split_first_lemma, ScriptItem};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);

const PROMPT_OPEN: &[u8] = b"<prompt>";
const PROMPT_CLOSE: &[u8] = b"</prompt>";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProverConfig {
    pub program: PathBuf,
    pub args: Vec<String>,
    /// Upper bound on the wait for each response.
    pub timeout: Duration,
}

impl ProverConfig {
    pub fn coqtop(program: impl Into<PathBuf>) -> Self {
        ProverConfig {
            program: program.into(),
            args: vec!["-quiet".into(), "-emacs".into()],
            timeout: DEFAULT_TIMEOUT,
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }
}

fn spawn_error(program: &Path, e: io::Error) -> Diagnostic {
    match e.kind() {
        io::ErrorKind::NotFound | io::ErrorKind::PermissionDenied => Diagnostic::error(
            Code::ProverMissing,
            format!("cannot start prover `{}`: {e}", program.display()),
        ),
        _ => Diagnostic::error(Code::Io, format!("cannot start prover `{}`: {e}", program.display())),
    }
}

fn find(haystack: &[u8], needle: &[u8]) -> Option<usize> {
    haystack.windows(needle.len()).position(|w| w == needle)
}

/// An interactive prover session.
pub struct ProverSession {
    child: Child,
    stdin: ChildStdin,
    output: Receiver<Vec<u8>>,
    pending: Vec<u8>,
    timeout: Duration,
}

impl ProverSession {
    /// Starts the prover and waits for its first prompt.
    pub fn spawn(config: &ProverConfig) -> Result<Self> {
        let io_err = |e: io::Error| Diagnostic::error(Code::Io, format!("cannot create prover pipe: {e}"));
        let (mut reader, writer) = io::pipe().map_err(io_err)?;
        let writer_err = writer.try_clone().map_err(io_err)?;
        let mut child = Command::new(&config.program)
            .args(&config.args)
            .stdin(Stdio::piped())
            .stdout(writer)
            .stderr(writer_err)
            .spawn()
            .map_err(|e| spawn_error(&config.program, e))?;
        let stdin = child.stdin.take().expect("stdin is piped");

        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            let mut buf = [0u8; 8192];
            loop {
                match reader.read(&mut buf) {
                    Ok(0) | Err(_) => break,
                    Ok(n) => {
                        if tx.send(buf[..n].to_vec()).is_err() {
                            break;
                        }
                    }
                }
            }
        });

        let mut session = ProverSession {
            child,
            stdin,
            output: rx,
            pending: Vec::new(),
            timeout: config.timeout,
        };
        session.read_response()?;
        Ok(session)
    }

    /// Submits one sentence and returns the prover's response with the
    /// prompt removed. A response containing `Error:` becomes
    /// `TACTIC_FAILED`.
    pub fn send(&mut self, sentence: &str) -> Result<String> {
        let mut line = normalize_ws(sentence);
        if !line.ends_with('.') {
            line.push('.');
        }
        line.push('\n');
        self.stdin
            .write_all(line.as_bytes())
            .and_then(|_| self.stdin.flush())
            .map_err(|e| Diagnostic::error(Code::ProverExited, format!("prover stopped accepting input: {e}")))?;
        let response = self.read_response()?;
        if let Some(pos) = response.find("Error:") {
            let message = normalize_ws(&response[pos..]);
            return Err(Diagnostic::error(Code::TacticFailed, message));
        }
        Ok(response)
    }

    fn read_response(&mut self) -> Result<String> {
        let deadline = Instant::now() + self.timeout;
        loop {
            if let Some(close) = find(&self.pending, PROMPT_CLOSE) {
                let open = find(&self.pending[..close], PROMPT_OPEN).unwrap_or(close);
                let response = String::from_utf8_lossy(&self.pending[..open]).into_owned();
                self.pending.drain(..close + PROMPT_CLOSE.len());
                return Ok(clean_response(&response));
            }
            let remaining = deadline.saturating_duration_since(Instant::now());
            match self.output.recv_timeout(remaining) {
                Ok(chunk) => self.pending.extend_from_slice(&chunk),
                Err(RecvTimeoutError::Timeout) => {
                    return Err(Diagnostic::error(
                        Code::ProverTimeout,
                        format!("no prompt from prover within {:?}", self.timeout),
                    ))
                }
                Err(RecvTimeoutError::Disconnected) => {
                    let tail = String::from_utf8_lossy(&self.pending);
                    return Err(Diagnostic::error(
                        Code::ProverExited,
                        format!("prover exited unexpectedly: {}", normalize_ws(&tail)),
                    ));
                }
            }
        }
    }
}

impl Drop for ProverSession {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Strips emacs-mode markup around messages.
fn clean_response(s: &str) -> String {
    let mut out = s.replace('\u{fd}', "");
    for tag in ["<infomsg>", "</infomsg>", "<warning>", "</warning>"] {
        out = out.replace(tag, "");
    }
    out.trim_start_matches(['\n', '\r']).to_string()
}

/// First line of `program --version`, if it answers within `timeout`.
pub fn prover_version(program: &Path, timeout: Duration) -> Option<String> {
    let mut child = Command::new(program)
        .arg("--version")
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .ok()?;
    let deadline = Instant::now() + timeout;
    loop {
        match child.try_wait() {
            Ok(Some(_)) => break,
            Ok(None) if Instant::now() < deadline => thread::sleep(Duration::from_millis(10)),
            _ => {
                let _ = child.kill();
                let _ = child.wait();
                return None;
            }
        }
    }
    let mut out = String::new();
    child.stdout.take()?.read_to_string(&mut out).ok()?;
    out.lines().map(str::trim).find(|l| !l.is_empty()).map(str::to_string)
}

/// Runs the first lemma of `items` against a live prover: preamble commands,
/// then the statement, then each tactic, capturing every response.
pub fn run_live(items: &[ScriptItem], config: &ProverConfig) -> Result<SessionTrace> {
    let block = split_first_lemma(items)?;
    let version = prover_version(&config.program, config.timeout);
    let mut session = ProverSession::spawn(config)?;
    let at = |span: Span| move |d: Diagnostic| if d.span.is_none() { d.with_span(span) } else { d };

    for cmd in &block.preamble {
        session.send(&cmd.text).map_err(at(cmd.span))?;
    }
    let initial_raw = session.send(&block.header.text).map_err(at(block.header.span))?;
    let initial = parse_state(&initial_raw).map_err(at(block.header.span))?;

    let mut steps = Vec::new();
    for item in block.tactics() {
        let raw = session.send(&item.text).map_err(at(item.span))?;
        let state_after = parse_state(&raw).map_err(at(item.span))?;
        steps.push(TraceStep { item, state_after });
    }
    Ok(SessionTrace {
        lemma: normalize_ws(&block.header.text),
        initial,
        steps,
        prover_version: version,
    })
}
