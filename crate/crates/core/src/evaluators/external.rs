//! Performance functions served by a subprocess over JSON lines.
//!
//! Wire protocol (UTF-8, one JSON object per line on the child's stdin/stdout):
//!
//! ```text
//! parent: {"type":"init","channels":[<all names>],"task":"<label>"}
//! child:  {"type":"ready"}
//! parent: {"type":"eval","channels":[<subset names>]}
//! child:  {"type":"result","performance":<number>}
//! parent: {"type":"shutdown"}          (child exits 0)
//! ```
//!
//! Any other line from the child is a protocol violation.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use super::{check_universe, EvalError, PerformanceFunction};
use crate::model::{ChannelNames, ChannelSet, Direction};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(300);

#[derive(Clone, Debug)]
pub struct ExternalEvaluatorConfig {
    pub program: String,
    pub args: Vec<String>,
    pub channel_names: ChannelNames,
    pub task: String,
    /// Per-request limit, applied to the handshake as well.
    pub timeout: Duration,
    pub direction: Direction,
    pub claims_monotone: bool,
}

impl ExternalEvaluatorConfig {
    pub fn new(program: impl Into<String>, channel_names: ChannelNames) -> Self {
        Self {
            program: program.into(),
            args: Vec::new(),
            channel_names,
            task: String::new(),
            timeout: DEFAULT_TIMEOUT,
            direction: Direction::Maximize,
            claims_monotone: false,
        }
    }

    /// Split a whitespace-separated command line into program and arguments.
    pub fn from_command_line(command: &str, channel_names: ChannelNames) -> Result<Self, EvalError> {
        let mut parts = command.split_whitespace().map(str::to_string);
        let program = parts
            .next()
            .ok_or_else(|| EvalError::EvaluatorFailure("empty evaluator command".into()))?;
        let mut config = Self::new(program, channel_names);
        config.args = parts.collect();
        Ok(config)
    }

    pub fn with_args<S: Into<String>>(mut self, args: impl IntoIterator<Item = S>) -> Self {
        self.args = args.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_task(mut self, task: impl Into<String>) -> Self {
        self.task = task.into();
        self
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }
}

struct Session {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<String>,
    broken: Option<EvalError>,
}

impl Session {
    fn send(&mut self, message: &Value) -> Result<(), EvalError> {
        let stdin = self.stdin.as_mut().expect("stdin open while session alive");
        let mut line = message.to_string();
        line.push('\n');
        if stdin.write_all(line.as_bytes()).and_then(|_| stdin.flush()).is_err() {
            return Err(self.exit_error());
        }
        Ok(())
    }

    fn receive(&mut self, timeout: Duration) -> Result<String, EvalError> {
        match self.lines.recv_timeout(timeout) {
            Ok(line) => Ok(line),
            Err(RecvTimeoutError::Timeout) => Err(EvalError::Timeout(timeout.as_secs_f64())),
            Err(RecvTimeoutError::Disconnected) => Err(self.exit_error()),
        }
    }

    fn exit_error(&mut self) -> EvalError {
        let deadline = Instant::now() + Duration::from_secs(5);
        loop {
            match self.child.try_wait() {
                Ok(Some(status)) => return EvalError::SubprocessExit(status.code()),
                Ok(None) if Instant::now() < deadline => thread::sleep(Duration::from_millis(10)),
                _ => return EvalError::SubprocessExit(None),
            }
        }
    }

    fn request(&mut self, message: &Value, timeout: Duration) -> Result<String, EvalError> {
        if let Some(err) = &self.broken {
            return Err(err.clone());
        }
        let result = self.send(message).and_then(|_| self.receive(timeout));
        if let Err(err) = &result {
            // The stream may be out of step now; refuse further requests.
            if matches!(err, EvalError::Timeout(_)) {
                let _ = self.child.kill();
            }
            self.broken = Some(err.clone());
        }
        result
    }
}

/// A running evaluator subprocess.
pub struct ExternalEvaluator {
    config: ExternalEvaluatorConfig,
    session: Mutex<Session>,
}

fn parse_object(line: &str) -> Result<serde_json::Map<String, Value>, EvalError> {
    match serde_json::from_str::<Value>(line) {
        Ok(Value::Object(map)) => Ok(map),
        _ => Err(EvalError::ProtocolViolation(line.to_string())),
    }
}

fn message_type(map: &serde_json::Map<String, Value>) -> Option<&str> {
    map.get("type").and_then(Value::as_str)
}

impl ExternalEvaluator {
    /// Spawn the child and complete the init/ready handshake.
    pub fn spawn(config: ExternalEvaluatorConfig) -> Result<Self, EvalError> {
        let mut child = Command::new(&config.program)
            .args(&config.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| EvalError::EvaluatorFailure(format!("cannot spawn {:?}: {e}", config.program)))?;
        let stdin = child.stdin.take();
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                match line {
                    Ok(line) => {
                        if tx.send(line).is_err() {
                            break;
                        }
                    }
                    Err(_) => break,
                }
            }
        });
        let mut session = Session {
            child,
            stdin,
            lines: rx,
            broken: None,
        };
        let init = json!({
            "type": "init",
            "channels": config.channel_names.as_slice(),
            "task": config.task,
        });
        let reply = session.request(&init, config.timeout)?;
        let map = parse_object(&reply)?;
        if message_type(&map) != Some("ready") {
            return Err(EvalError::ProtocolViolation(reply));
        }
        Ok(Self {
            config,
            session: Mutex::new(session),
        })
    }

    pub fn config(&self) -> &ExternalEvaluatorConfig {
        &self.config
    }

    /// Send `shutdown` and wait for the child; returns its exit code.
    pub fn shutdown(self) -> Result<Option<i32>, EvalError> {
        let mut session = self.session.lock().expect("session poisoned");
        session.finish(self.config.timeout)
    }
}

impl Session {
    fn finish(&mut self, timeout: Duration) -> Result<Option<i32>, EvalError> {
        if self.stdin.is_some() {
            let _ = self.send(&json!({"type": "shutdown"}));
            self.stdin = None;
        }
        let deadline = Instant::now() + timeout.min(Duration::from_secs(10));
        loop {
            match self.child.try_wait() {
                Ok(Some(status)) => return Ok(status.code()),
                Ok(None) if Instant::now() < deadline => thread::sleep(Duration::from_millis(5)),
                Ok(None) => {
                    let _ = self.child.kill();
                    let _ = self.child.wait();
                    return Err(EvalError::Timeout(timeout.as_secs_f64()));
                }
                Err(e) => return Err(EvalError::EvaluatorFailure(e.to_string())),
            }
        }
    }
}

impl Drop for ExternalEvaluator {
    fn drop(&mut self) {
        if let Ok(mut session) = self.session.lock() {
            if session.stdin.is_some() {
                let _ = session.finish(Duration::from_secs(2));
            }
        }
    }
}

impl PerformanceFunction for ExternalEvaluator {
    fn channel_count(&self) -> usize {
        self.config.channel_names.len()
    }

    fn evaluate(&self, subset: ChannelSet) -> Result<f64, EvalError> {
        check_universe(self.channel_count(), subset)?;
        let request = json!({
            "type": "eval",
            "channels": self.config.channel_names.names_of(subset),
        });
        let line = self
            .session
            .lock()
            .expect("session poisoned")
            .request(&request, self.config.timeout)?;
        let map = parse_object(&line)?;
        match (message_type(&map), map.get("performance").and_then(Value::as_f64)) {
            (Some("result"), Some(performance)) => Ok(performance),
            _ => Err(EvalError::ProtocolViolation(line)),
        }
    }

    fn direction(&self) -> Direction {
        self.config.direction
    }

    fn claims_monotone(&self) -> bool {
        self.config.claims_monotone
    }
}

/// Spawn, evaluate one subset, shut down.
pub fn external_evaluate(config: &ExternalEvaluatorConfig, subset: ChannelSet) -> Result<f64, EvalError> {
    let evaluator = ExternalEvaluator::spawn(config.clone())?;
    let value = evaluator.evaluate(subset)?;
    evaluator.shutdown()?;
    Ok(value)
}
