//! Functions under test: native closures or external processes speaking
//! line-delimited JSON.

use std::io::{BufRead, BufReader, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use serde_json::json;

use super::DriverError;
use crate::logic::{from_json, to_json, CallError, Value};
use crate::spec::{Sort, SpecModule};

/// What running the function produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Returned(Value),
    Crashed(String),
}

pub type NativeFn = Box<dyn FnMut(&[Value]) -> Result<Value, CallError> + Send>;

pub enum FunctionUnderTest {
    Native(NativeFn),
    External(ExternalFut),
}

impl FunctionUnderTest {
    pub fn native(f: impl FnMut(&[Value]) -> Result<Value, CallError> + Send + 'static) -> Self {
        FunctionUnderTest::Native(Box::new(f))
    }

    /// An external program, started on first use and reused across tests.
    pub fn external(program: impl Into<String>, args: Vec<String>) -> Self {
        FunctionUnderTest::External(ExternalFut {
            program: program.into(),
            args,
            process: None,
        })
    }

    pub fn is_external(&self) -> bool {
        matches!(self, FunctionUnderTest::External(_))
    }

    pub(crate) fn execute(
        &mut self,
        module: &SpecModule,
        result: &Sort,
        args: &[Value],
        timeout: Option<Duration>,
    ) -> Result<Outcome, DriverError> {
        match self {
            FunctionUnderTest::Native(f) => match catch_unwind(AssertUnwindSafe(|| f(args))) {
                Ok(Ok(v)) => Ok(Outcome::Returned(v)),
                Ok(Err(e)) => Ok(Outcome::Crashed(e.0)),
                Err(panic) => Ok(Outcome::Crashed(panic_message(&panic))),
            },
            FunctionUnderTest::External(e) => e.execute(module, result, args, timeout),
        }
    }
}

fn panic_message(p: &Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = p.downcast_ref::<&str>() {
        s.to_string()
    } else if let Some(s) = p.downcast_ref::<String>() {
        s.clone()
    } else {
        "panic".into()
    }
}

pub struct ExternalFut {
    program: String,
    args: Vec<String>,
    process: Option<FutProcess>,
}

struct FutProcess {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
}

impl Drop for FutProcess {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl ExternalFut {
    fn spawn(&self) -> Result<FutProcess, DriverError> {
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| DriverError::Fut(format!("cannot start `{}`: {e}", self.program)))?;
        let stdin = child.stdin.take().expect("piped stdin");
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
        Ok(FutProcess {
            child,
            stdin,
            lines: rx,
        })
    }

    fn execute(
        &mut self,
        module: &SpecModule,
        result: &Sort,
        args: &[Value],
        timeout: Option<Duration>,
    ) -> Result<Outcome, DriverError> {
        if self.process.is_none() {
            self.process = Some(self.spawn()?);
        }
        let proc = self.process.as_mut().unwrap();
        let encoded = args
            .iter()
            .map(to_json)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| DriverError::Fut(e.to_string()))?;
        let request = json!({ "args": encoded }).to_string();
        if writeln!(proc.stdin, "{request}").and_then(|_| proc.stdin.flush()).is_err() {
            self.process = None;
            return Ok(Outcome::Crashed("process exited before reading its input".into()));
        }
        let line = match timeout {
            Some(t) => proc.lines.recv_timeout(t),
            None => proc.lines.recv().map_err(|_| RecvTimeoutError::Disconnected),
        };
        let line = match line {
            Ok(l) => l,
            Err(RecvTimeoutError::Timeout) => {
                self.process = None;
                return Err(DriverError::FutTimeout(timeout.unwrap()));
            }
            Err(RecvTimeoutError::Disconnected) => {
                let status = proc.child.wait().ok();
                self.process = None;
                let how = status.map_or("unknown status".to_string(), |s| s.to_string());
                return Ok(Outcome::Crashed(format!("process exited ({how})")));
            }
        };
        let reply: serde_json::Value = serde_json::from_str(&line)
            .map_err(|e| DriverError::Fut(format!("malformed response `{line}`: {e}")))?;
        if let Some(r) = reply.get("result") {
            let v = from_json(module, result, r)
                .map_err(|e| DriverError::Fut(format!("bad result `{r}`: {e}")))?;
            return Ok(Outcome::Returned(v));
        }
        if let Some(msg) = reply.get("error") {
            let msg = msg.as_str().map_or_else(|| msg.to_string(), str::to_string);
            return Ok(Outcome::Crashed(msg));
        }
        Err(DriverError::Fut(format!(
            "response must have a `result` or `error` field: `{line}`"
        )))
    }
}
