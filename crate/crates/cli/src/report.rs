use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use anyhow::Context;
use morass_core::report::{Check, CheckList};
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

/// Everything a subcommand reports; timing is the only field that varies
/// between identical runs.
#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: Value,
    pub checks: Vec<Check>,
    pub result: Value,
    pub passed: bool,
    pub elapsed_ms: u128,
}

pub struct Builder {
    command: String,
    config: Value,
    checks: CheckList,
    result: Value,
    started: Instant,
}

impl Builder {
    pub fn new(command: &str, config: Value) -> Self {
        Builder {
            command: command.to_string(),
            config,
            checks: CheckList::default(),
            result: Value::Null,
            started: Instant::now(),
        }
    }

    pub fn checks(&mut self, list: CheckList) {
        self.checks.checks.extend(list.checks);
    }

    pub fn verdict(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, passed, detail));
    }

    pub fn result(&mut self, result: Value) {
        self.result = result;
    }

    pub fn finish(self) -> Report {
        Report {
            schema: SCHEMA_VERSION,
            tool: "morass",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            config: self.config,
            passed: self.checks.passed(),
            checks: self.checks.checks,
            result: self.result,
            elapsed_ms: self.started.elapsed().as_millis(),
        }
    }
}

impl Report {
    pub fn emit(&self, json: bool, save: Option<&Path>) -> anyhow::Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        if let Some(path) = save {
            std::fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display()))?;
        }
        let out = if json { format!("{text}\n") } else { self.human() };
        match std::io::stdout().lock().write_all(out.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        }
    }

    fn human(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            if c.detail.is_empty() {
                let _ = writeln!(s, "{mark}  {}", c.name);
            } else {
                let _ = writeln!(s, "{mark}  {}: {}", c.name, c.detail);
            }
        }
        if let Value::Object(fields) = &self.result {
            for (k, v) in fields {
                let _ = match v {
                    Value::String(t) if t.contains('\n') => writeln!(s, "{k}:\n{t}"),
                    Value::String(t) => writeln!(s, "{k}: {t}"),
                    other => writeln!(s, "{k}: {other}"),
                };
            }
        }
        let _ = writeln!(
            s,
            "{} ({} ms)",
            if self.passed { "ok" } else { "FAILED" },
            self.elapsed_ms
        );
        s
    }
}
