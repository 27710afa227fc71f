//! Exit codes and the text/JSON rendering of command results.

use std::process::ExitCode;

use kexshard::error::Error;
use serde_json::{json, Value};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_SHARES: u8 = 2;
pub const EXIT_ANALYSIS: u8 = 3;

/// A finished command: text for humans, one document for `--json`.
pub struct Outcome {
    pub text: String,
    pub json: Value,
    pub code: u8,
    pub warnings: Vec<String>,
}

impl Outcome {
    pub fn ok(text: String, json: Value) -> Self {
        Outcome {
            text,
            json,
            code: EXIT_OK,
            warnings: Vec::new(),
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub error: anyhow::Error,
}

impl CliError {
    pub fn usage(error: impl Into<anyhow::Error>) -> Self {
        CliError {
            code: EXIT_USAGE,
            error: error.into(),
        }
    }

    pub fn shares(error: impl Into<anyhow::Error>) -> Self {
        CliError {
            code: EXIT_SHARES,
            error: error.into(),
        }
    }
}

/// Share-set and container errors exit 2; everything else exits 1.
pub fn code_of(e: &Error) -> u8 {
    match e {
        Error::IncompleteSet { .. }
        | Error::CorruptSet(_)
        | Error::BadMagic
        | Error::UnsupportedVersion(_)
        | Error::ChecksumMismatch { .. }
        | Error::TruncatedContainer(_)
        | Error::BadHeader(_) => EXIT_SHARES,
        _ => EXIT_USAGE,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            code: code_of(&e),
            error: e.into(),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(error: anyhow::Error) -> Self {
        let code = error.downcast_ref::<Error>().map_or(EXIT_USAGE, code_of);
        CliError { code, error }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::usage(e)
    }
}

pub fn finish(result: Result<Outcome, CliError>, json: bool) -> ExitCode {
    match result {
        Ok(out) => {
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            if json {
                let mut doc = out.json;
                if let Value::Object(map) = &mut doc {
                    map.insert("exitCode".into(), json!(out.code));
                    if !out.warnings.is_empty() {
                        map.insert("warnings".into(), json!(out.warnings));
                    }
                }
                println!("{doc}");
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            if json {
                println!("{}", json!({ "error": format!("{:#}", e.error), "exitCode": e.code }));
            } else {
                eprintln!("error: {:#}", e.error);
            }
            ExitCode::from(e.code)
        }
    }
}
