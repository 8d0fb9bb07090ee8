//! CSV and JSON artifacts.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::Value;

/// Shortest decimal that round-trips the value rounded to 12 significant
/// digits.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("valid float");
    format!("{rounded}")
}

/// [`num`] as a JSON number.
pub fn jnum(x: f64) -> Value {
    num(x).parse::<f64>().map(Value::from).unwrap_or(Value::Null)
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv { text: header.join(",") + "\n" }
    }

    pub fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

/// Writes `name` under `out`, or to stdout when no directory is given.
pub fn emit(out: Option<&Path>, name: &str, body: &str) -> Result<()> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(name);
            fs::write(&path, body).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

/// Summary JSON goes to `summary.json` in the output directory, else to
/// stderr so stdout stays a clean table.
pub fn emit_summary(out: Option<&Path>, summary: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(summary)? + "\n";
    match out {
        Some(_) => emit(out, "summary.json", &text),
        None => {
            std::io::stderr().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}
