//! A solver child process speaking SMT-LIB2 over stdin/stdout.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use super::sexp::is_complete;
use super::SmtError;

/// How to launch the solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverCommand {
    pub program: String,
    pub args: Vec<String>,
}

impl SolverCommand {
    pub const ENV: &'static str = "TARGET_SOLVER";

    /// Splits a command line on whitespace. A bare `z3` gets `-in` appended
    /// so it reads commands from stdin.
    pub fn parse(cmdline: &str) -> Option<SolverCommand> {
        let mut words = cmdline.split_whitespace().map(str::to_string);
        let program = words.next()?;
        let mut args: Vec<String> = words.collect();
        let base = std::path::Path::new(&program)
            .file_name()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_default();
        if args.is_empty() && base.starts_with("z3") {
            args.push("-in".into());
        }
        Some(SolverCommand { program, args })
    }

    /// `$TARGET_SOLVER` if set, otherwise `z3 -in`.
    pub fn from_env() -> SolverCommand {
        std::env::var(Self::ENV)
            .ok()
            .and_then(|s| SolverCommand::parse(&s))
            .unwrap_or_else(SolverCommand::default)
    }
}

impl Default for SolverCommand {
    fn default() -> Self {
        SolverCommand {
            program: "z3".into(),
            args: vec!["-in".into()],
        }
    }
}

pub struct Solver {
    child: Child,
    stdin: BufWriter<ChildStdin>,
    lines: Receiver<String>,
    alive: bool,
}

impl Solver {
    pub fn spawn(cmd: &SolverCommand) -> Result<Solver, SmtError> {
        let mut child = Command::new(&cmd.program)
            .args(&cmd.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| SmtError::Spawn {
                program: cmd.program.clone(),
                reason: e.to_string(),
            })?;
        let stdin = BufWriter::new(child.stdin.take().expect("piped stdin"));
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Solver {
            child,
            stdin,
            lines: rx,
            alive: true,
        })
    }

    /// Queues text for the solver without waiting for a reply.
    pub fn send(&mut self, text: &str) -> Result<(), SmtError> {
        if !self.alive {
            return Err(SmtError::Dead);
        }
        self.stdin
            .write_all(text.as_bytes())
            .map_err(|e| SmtError::Io(e.to_string()))
    }

    /// Sends `cmd` and reads one complete response.
    pub fn query(&mut self, cmd: &str, timeout: Option<Duration>) -> Result<String, SmtError> {
        self.send(cmd)?;
        self.send("\n")?;
        self.stdin.flush().map_err(|e| SmtError::Io(e.to_string()))?;
        let deadline = timeout.map(|t| Instant::now() + t);
        let mut buf = String::new();
        loop {
            let line = match deadline {
                None => self.lines.recv().map_err(|_| RecvTimeoutError::Disconnected),
                Some(d) => self
                    .lines
                    .recv_timeout(d.saturating_duration_since(Instant::now())),
            };
            match line {
                Ok(l) => {
                    if !buf.is_empty() {
                        buf.push('\n');
                    }
                    buf.push_str(&l);
                    if is_complete(&buf) {
                        break;
                    }
                }
                Err(RecvTimeoutError::Timeout) => {
                    self.kill();
                    return Err(SmtError::Timeout);
                }
                Err(RecvTimeoutError::Disconnected) => {
                    self.alive = false;
                    return Err(SmtError::Io("solver exited unexpectedly".into()));
                }
            }
        }
        let trimmed = buf.trim();
        if let Some(rest) = trimmed.strip_prefix("(error") {
            return Err(SmtError::Solver(rest.trim_end_matches(')').trim().trim_matches('"').to_string()));
        }
        Ok(trimmed.to_string())
    }

    fn kill(&mut self) {
        self.alive = false;
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl Drop for Solver {
    fn drop(&mut self) {
        if self.alive {
            let _ = self.stdin.write_all(b"(exit)\n");
            let _ = self.stdin.flush();
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
