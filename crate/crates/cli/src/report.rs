use std::fmt;
use std::process::ExitCode;

use serde_json::{Map, Value};

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

impl Verdict {
    pub fn from_bool(holds: bool) -> Self {
        if holds {
            Verdict::Holds
        } else {
            Verdict::Violated
        }
    }

    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Violated, _) | (_, Violated) => Violated,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Holds,
        }
    }

    fn code(self) -> u8 {
        match self {
            Verdict::Holds => 0,
            Verdict::Violated => 1,
            Verdict::Inconclusive => 3,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Bad or unreadable input; exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<E: std::error::Error> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

pub fn input_error<T>(msg: impl Into<String>) -> Result<T, InputError> {
    Err(InputError(msg.into()))
}

/// Accumulated text lines and JSON fields of one command run.
#[derive(Debug)]
pub struct Report {
    pub verdict: Verdict,
    lines: Vec<String>,
    fields: Map<String, Value>,
}

impl Report {
    pub fn new() -> Self {
        Report {
            verdict: Verdict::Holds,
            lines: Vec::new(),
            fields: Map::new(),
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn field(&mut self, key: &str, value: Value) {
        self.fields.insert(key.to_string(), value);
    }

    pub fn fold(&mut self, verdict: Verdict) {
        self.verdict = self.verdict.and(verdict);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

pub fn emit(command: &str, format: Format, result: Result<Report, InputError>) -> ExitCode {
    match (format, result) {
        (Format::Text, Ok(report)) => {
            for line in &report.lines {
                println!("{line}");
            }
            println!("verdict: {}", report.verdict.label());
            ExitCode::from(report.verdict.code())
        }
        (Format::Json, Ok(report)) => {
            let mut out = Map::new();
            out.insert("command".into(), command.into());
            out.insert("verdict".into(), report.verdict.label().into());
            out.insert("exit_code".into(), report.verdict.code().into());
            out.extend(report.fields);
            println!(
                "{}",
                serde_json::to_string_pretty(&Value::Object(out)).expect("reports serialize")
            );
            ExitCode::from(report.verdict.code())
        }
        (Format::Text, Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        (Format::Json, Err(e)) => {
            let out = serde_json::json!({
                "command": command,
                "verdict": "input-error",
                "exit_code": 2,
                "error": e.0,
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&out).expect("reports serialize")
            );
            ExitCode::from(2)
        }
    }
}
