//! Canonical JSON reports.
//!
//! Object keys are emitted in sorted order and everything except the
//! `timing` section is a pure function of the configuration, so equal
//! configurations give byte-identical reports apart from `timing`.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub field: Option<Value>,
    pub result: Value,
    pub pass: bool,
    pub timing: Value,
}

/// Hex SHA-256 of the canonical serialization of command and configuration.
pub fn config_hash(command: &str, config: &Value) -> String {
    let canon = json!({"command": command, "config": config}).to_string();
    format!("{:x}", Sha256::digest(canon.as_bytes()))
}

impl Report {
    pub fn new(command: &str, config: Value) -> Report {
        Report {
            command: command.to_string(),
            config,
            field: None,
            result: Value::Null,
            pass: true,
            timing: json!({}),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "tool": TOOL,
            "version": VERSION,
            "command": self.command,
            "config": self.config,
            "config_hash": config_hash(&self.command, &self.config),
            "field": self.field,
            "result": self.result,
            "pass": self.pass,
            "timing": self.timing,
        })
    }

    /// Pretty JSON with a trailing newline.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Writes to `path`, or to stdout when absent.
pub fn write_out(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}
