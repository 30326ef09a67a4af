//! Deterministic CSV and JSON emission: `.` decimal separator, 17
//! significant digits, LF line endings, fixed key order.

use anyhow::{Context, Result};
use snb_core::format::fmt_f64;
use std::io::Write;
use std::path::PathBuf;

/// Accumulates output text and writes it to a file or stdout at the end.
pub struct Sink {
    buffer: String,
    target: Option<PathBuf>,
}

impl Sink {
    pub fn new(target: Option<PathBuf>) -> Self {
        Sink {
            buffer: String::new(),
            target,
        }
    }

    pub fn line(&mut self, text: &str) {
        self.buffer.push_str(text);
        self.buffer.push('\n');
    }

    pub fn csv_row(&mut self, fields: &[String]) {
        self.line(&fields.join(","));
    }

    pub fn finish(self) -> Result<()> {
        match self.target {
            Some(path) => std::fs::write(&path, self.buffer.as_bytes())
                .with_context(|| format!("cannot write {}", path.display())),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(self.buffer.as_bytes()).context("stdout")?;
                Ok(())
            }
        }
    }
}

/// Minimal JSON value with deterministic serialization.
pub enum Json {
    Number(f64),
    Integer(i64),
    Bool(bool),
    Array(Vec<Json>),
    /// Keys keep insertion order.
    Object(Vec<(String, Json)>),
}

impl Json {
    pub fn render(&self) -> String {
        match self {
            Json::Number(v) => fmt_f64(*v),
            Json::Integer(v) => v.to_string(),
            Json::Bool(b) => b.to_string(),
            Json::Array(items) => {
                let inner: Vec<String> = items.iter().map(Json::render).collect();
                format!("[{}]", inner.join(","))
            }
            Json::Object(pairs) => {
                let inner: Vec<String> = pairs
                    .iter()
                    .map(|(k, v)| format!("\"{k}\":{}", v.render()))
                    .collect();
                format!("{{{}}}", inner.join(","))
            }
        }
    }
}
