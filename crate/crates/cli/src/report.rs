use std::io::{ErrorKind, Write};
use std::path::Path;
use std::time::Instant;

use serde_json::Value;

use crate::error::CliError;

pub fn emit(report: &Value, path: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    match path {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != ErrorKind::BrokenPipe => return Err(e.into()),
            _ => {}
        },
    }
    Ok(())
}

/// Writes `report.json` into the output directory.
pub fn save(report: &Value, out: &Path) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    std::fs::write(out.join("report.json"), text + "\n")?;
    Ok(())
}

/// Named wall-clock phases in milliseconds.
pub struct Timings {
    start: Instant,
    phases: serde_json::Map<String, Value>,
}

impl Timings {
    pub fn new() -> Self {
        Self {
            start: Instant::now(),
            phases: serde_json::Map::new(),
        }
    }

    pub fn lap(&mut self, name: &str) {
        let now = Instant::now();
        let ms = (now - self.start).as_secs_f64() * 1e3;
        self.phases.insert(name.to_string(), Value::from(ms));
        self.start = now;
    }

    pub fn into_value(self) -> Value {
        Value::Object(self.phases)
    }
}
